//! Exact enumeration of set partitions by restricted growth strings and
//! the total-probability certificate built on it.

use crate::error::{Error, Result};
use crate::gibbs::types::{SetPartition, VTable};
use crate::gibbs::vtable::eppf;
use crate::specfun::rising;

/// Bell-number cap: Bell(10) = 115975 partitions.
pub const ENUMERATION_CAP: usize = 10;

/// Iterator over all restricted growth strings of length n, i.e. all set
/// partitions of {0, ..., n-1}, in lexicographic order.
pub struct RgsIter {
    a: Vec<usize>,
    b: Vec<usize>,
    done: bool,
}

impl RgsIter {
    pub fn new(n: usize) -> Self {
        RgsIter {
            a: vec![0; n],
            b: vec![0; n.max(1)],
            done: n == 0,
        }
    }
}

impl Iterator for RgsIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.a.clone();
        // advance: find the last position that can still grow
        let n = self.a.len();
        let mut j = n;
        loop {
            if j <= 1 {
                self.done = true;
                break;
            }
            j -= 1;
            if self.a[j] <= self.b[j] {
                self.a[j] += 1;
                for i in j + 1..n {
                    self.a[i] = 0;
                }
                for i in j + 1..n {
                    self.b[i] = self.b[i - 1].max(self.a[i - 1]);
                }
                break;
            }
        }
        Some(out)
    }
}

/// All set partitions of {0, ..., n-1}.
pub fn rgs_partitions(n: usize) -> impl Iterator<Item = SetPartition> {
    RgsIter::new(n).map(|rgs| SetPartition::from_rgs(&rgs).expect("generated strings are valid"))
}

/// Outcome of the exact total-probability certificate.
#[derive(Clone, Debug)]
pub struct EnumerationReport {
    pub n: usize,
    pub partitions: usize,
    /// |sum of EPPF over all set partitions of [n] - 1|
    pub sum_error: f64,
    /// propagated standard error of the sum (0 for deterministic tables)
    pub sum_sigma: f64,
    /// worst relative backward-recursion residual of the table
    pub worst_residual: f64,
    /// min positivity margin (v - 3 sigma)/v over all cells
    pub min_margin: f64,
}

/// Iterate all set partitions of {1..n}, sum their EPPF values, and
/// report the distance from total probability 1, the worst recursion
/// residual, and the positivity margin.
pub fn enumerate_check(vt: &VTable, n: usize) -> Result<EnumerationReport> {
    if n > ENUMERATION_CAP {
        return Err(Error::invalid(format!(
            "enumeration capped at n = {ENUMERATION_CAP} (Bell numbers grow too fast)"
        )));
    }
    if n > vt.n_max() {
        return Err(Error::OutOfRange { n, cap: vt.n_max() });
    }
    let a = vt.alpha().alpha();
    // aggregate the product weights by block count so cell uncertainties
    // enter the sum once per cell
    let mut coeff = vec![0.0f64; n + 1];
    let mut count = 0usize;
    for rgs in RgsIter::new(n) {
        let k = rgs.iter().copied().max().unwrap_or(0) + 1;
        let mut sizes = vec![0usize; k];
        for &x in &rgs {
            sizes[x] += 1;
        }
        let mut w = 1.0;
        for &s in &sizes {
            w *= rising(1.0 - a, s - 1);
        }
        coeff[k] += w;
        count += 1;
    }
    let mut sum = 0.0;
    let mut var = 0.0;
    for k in 1..=n {
        sum += coeff[k] * vt.v(n, k);
        var += (coeff[k] * vt.sigma(n, k)).powi(2);
    }
    Ok(EnumerationReport {
        n,
        partitions: count,
        sum_error: (sum - 1.0).abs(),
        sum_sigma: var.sqrt(),
        worst_residual: vt.worst_backward_residual(),
        min_margin: vt.min_positivity_margin(),
    })
}

/// Sum of EPPF values over all set partitions of [n], computed partition
/// by partition (used by tests that exercise the `eppf` path itself).
pub fn eppf_sum_by_enumeration(vt: &VTable, n: usize) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut var_coeff = vec![0.0f64; n + 1];
    for p in rgs_partitions(n) {
        let e = eppf(vt, &p.composition())?;
        sum += e.value;
        if e.std_error > 0.0 {
            var_coeff[p.k()] += e.std_error;
        }
    }
    let var: f64 = var_coeff.iter().map(|s| s * s).sum();
    Ok((sum, var.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell(n: usize) -> usize {
        RgsIter::new(n).count()
    }

    #[test]
    fn bell_numbers() {
        assert_eq!(bell(1), 1);
        assert_eq!(bell(2), 2);
        assert_eq!(bell(3), 5);
        assert_eq!(bell(4), 15);
        assert_eq!(bell(5), 52);
        assert_eq!(bell(8), 4140);
        assert_eq!(bell(10), 115975);
    }

    #[test]
    fn rgs_are_valid_and_distinct() {
        let all: Vec<Vec<usize>> = RgsIter::new(5).collect();
        for rgs in &all {
            assert!(SetPartition::from_rgs(rgs).is_ok());
        }
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), all.len());
    }
}
