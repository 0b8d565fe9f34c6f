//! Double-double (~106-bit) compensated arithmetic.
//!
//! Fixed-precision error-free transformations used by the series
//! evaluations whose terms cancel far below the f64 mantissa. This is
//! plain Dekker/Knuth compensated arithmetic, not arbitrary precision.

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[cfg(test)]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two f64 values.
    #[inline]
    pub fn prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, rhs: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs.hi);
        let p2 = p2 + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, rhs);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * rhs);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        Dd { hi, lo }
    }

    #[cfg(test)]
    pub fn div_f64(self, rhs: f64) -> Dd {
        self.div(Dd { hi: rhs, lo: 0.0 })
    }
}

/// Taylor coefficients of 1/Gamma(z) about z0 = 3/2, valid on |z - 3/2| <= 1/2.
/// Reconstructs 1/Gamma on [1, 2] to ~5e-34 relative.
const RECIP_GAMMA_COEFFS: [Dd; 40] = [
    Dd { hi: 1.1283791670955126, lo: 1.533545961316588e-17 },
    Dd { hi: -0.0411745264452831, lo: -3.3752130157375745e-18 },
    Dd { hi: -0.5266544355255445, lo: -6.112036385608127e-18 },
    Dd { hi: 0.17510202604393457, lo: -1.0657471268514412e-17 },
    Dd { hi: 0.050966860247706074, lo: 3.1247224718944427e-18 },
    Dd { hi: -0.042155169368535604, lo: 3.0976342103734477e-18 },
    Dd { hi: 0.006612897826824127, lo: 3.573455638859823e-19 },
    Dd { hi: 0.002120731442572938, lo: 1.3781297975220145e-19 },
    Dd { hi: -0.0011107302545948906, lo: -9.753454144222531e-20 },
    Dd { hi: 0.00015235762076747688, lo: -1.0906520861329338e-20 },
    Dd { hi: 2.5355204923814165e-05, lo: 4.893956349690275e-22 },
    Dd { hi: -1.3896805717913756e-05, lo: 2.1533543121307036e-22 },
    Dd { hi: 2.1562032905141724e-06, lo: 8.714226745633228e-23 },
    Dd { hi: 5.7942640540526726e-08, lo: -7.454341938541845e-25 },
    Dd { hi: -8.913551118311116e-08, lo: -3.639776989356635e-24 },
    Dd { hi: 1.7103469415915374e-08, lo: 1.1274857846497739e-25 },
    Dd { hi: -9.313686445241901e-10, lo: -3.474969316158858e-26 },
    Dd { hi: -2.6804741033496623e-10, lo: -2.3612584194639298e-26 },
    Dd { hi: 7.458932233316326e-11, lo: 2.4373478754056218e-27 },
    Dd { hi: -8.012807061414718e-12, lo: -7.570390468804759e-28 },
    Dd { hi: -8.382343033451855e-14, lo: 3.885823863175652e-30 },
    Dd { hi: 1.6946340904320522e-13, lo: 2.2653509452158334e-30 },
    Dd { hi: -2.7875756707125753e-14, lo: 6.524116911441165e-31 },
    Dd { hi: 1.8670394695065306e-15, lo: -4.254392590878746e-32 },
    Dd { hi: 1.3049499008587988e-16, lo: -9.270238560188959e-33 },
    Dd { hi: -4.8588741441877864e-17, lo: -1.339620604759889e-33 },
    Dd { hi: 5.829542692459468e-18, lo: -7.523759917630262e-35 },
    Dd { hi: -2.592909417993784e-19, lo: 4.8295929078260184e-36 },
    Dd { hi: -3.326754010285789e-20, lo: 1.6251345689863235e-36 },
    Dd { hi: 7.944961635768106e-21, lo: -3.661196591132274e-37 },
    Dd { hi: -7.755543288437357e-22, lo: -3.001439691199397e-38 },
    Dd { hi: 2.5533736291329696e-23, lo: 1.0788765942473458e-40 },
    Dd { hi: 4.274520160147173e-24, lo: 2.7654689015952895e-40 },
    Dd { hi: -8.263381374668449e-25, lo: -2.4845851081041036e-41 },
    Dd { hi: 7.108187657253398e-26, lo: 7.154417290279865e-43 },
    Dd { hi: -2.0749463887704297e-27, lo: 9.526265424997407e-44 },
    Dd { hi: -3.2859544069948607e-28, lo: 1.8037039593084174e-44 },
    Dd { hi: 5.819433908198748e-29, lo: 3.4860696818237906e-46 },
    Dd { hi: -4.7029321304498936e-30, lo: 2.6084244137039753e-46 },
    Dd { hi: 1.4478556515852866e-31, lo: -7.966994137147836e-48 },
];

/// 1/Gamma(x) in double-double precision for x >= 0.5.
///
/// Reduces x into [1, 2) through the recurrence Gamma(x) = (x-1)Gamma(x-1)
/// and evaluates the frozen Taylor polynomial; the downshift factors are
/// exact double-double operations, so terms inherit only the polynomial's
/// ~1e-33 relative error.
pub(crate) fn recip_gamma_dd(x: Dd) -> Dd {
    debug_assert!(x.hi >= 0.5);
    // number of unit downshifts so that z = x - m lies in [1, 2)
    let m = if x.hi < 1.0 {
        -1i64
    } else {
        (x.hi - 1.0).floor() as i64
    };
    let z = x.add_f64(-(m as f64));
    let dz = z.add_f64(-1.5);
    let mut poly = Dd::ZERO;
    for c in RECIP_GAMMA_COEFFS.iter().rev() {
        poly = poly.mul(dz).add(*c);
    }
    // 1/Gamma(x) = [1/Gamma(z)] / prod_{i=1..m} (x - i); for m = -1 the
    // recurrence runs upward once: 1/Gamma(x) = x * (1/Gamma(x+1)).
    if m < 0 {
        poly.mul(x)
    } else {
        let mut denom = Dd::ONE;
        for i in 1..=m {
            denom = denom.mul(x.add_f64(-(i as f64)));
        }
        poly.div(denom)
    }
}
