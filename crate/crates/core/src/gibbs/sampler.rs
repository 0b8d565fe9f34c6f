//! Sequential sampling of a partition from a certified V-table.

use crate::error::{Error, Result};
use crate::gibbs::types::{SetPartition, VTable};
use rand::Rng;

/// Draw a set partition of {1..n} whose law has the table's EPPF, by the
/// sequential rule: item m+1 joins block j with probability
/// (V_{m+1,k}/V_{m,k}) (n_j - alpha), or opens a new block with
/// probability V_{m+1,k+1}/V_{m,k}. Blocks are addressed in creation
/// order. The per-step probabilities sum to 1 by the backward recursion;
/// a cell that turns negative (recursion cancellation) is an error.
pub fn sample_partition<R: Rng + ?Sized>(
    vt: &VTable,
    n: usize,
    rng: &mut R,
) -> Result<SetPartition> {
    if n == 0 {
        return Err(Error::invalid("partition size must be >= 1"));
    }
    if n > vt.n_max() {
        return Err(Error::OutOfRange { n, cap: vt.n_max() });
    }
    let a = vt.alpha().alpha();
    let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
    for item in 1..n {
        let m = item; // current number of seated items
        let k = blocks.len();
        let vm = vt.v(m, k);
        if !(vm > 0.0) {
            return Err(Error::NegativeProbability {
                n: m,
                k,
                value: vm,
            });
        }
        let join_scale = vt.v(m + 1, k) / vm;
        let new_p = vt.v(m + 1, k + 1) / vm;
        if new_p < -1e-12 || join_scale < -1e-12 {
            return Err(Error::NegativeProbability {
                n: m + 1,
                k: k + 1,
                value: new_p.min(join_scale),
            });
        }
        let mut probs: Vec<f64> = blocks
            .iter()
            .map(|b| join_scale * (b.len() as f64 - a))
            .collect();
        probs.push(new_p);
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Certification(format!(
                "sequential probabilities at step {m} sum to {total}, not 1; \
                 table fails the recursion identity"
            )));
        }
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut choice = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u <= acc {
                choice = i;
                break;
            }
        }
        if choice == blocks.len() {
            blocks.push(vec![item]);
        } else {
            blocks[choice].push(item);
        }
    }
    SetPartition::from_blocks(blocks)
}
