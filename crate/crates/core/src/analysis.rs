//! Recurrence exponents, depth prediction and crossover detection.

use std::collections::HashMap;
use std::str::FromStr;

use crate::synth::{mcx_linear, PartitionPlan};
use crate::{Error, Result};

/// `T(k) = constant + sum a_i T(k / b_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceSpec {
    pub terms: Vec<(f64, f64)>,
    pub constant: f64,
}

impl RecurrenceSpec {
    pub fn new(terms: Vec<(f64, f64)>) -> Result<Self> {
        let spec = RecurrenceSpec { terms, constant: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::Config("recurrence needs at least one term".into()));
        }
        for &(a, b) in &self.terms {
            if !(a > 0.0 && a.is_finite()) || !(b > 1.0 && b.is_finite()) {
                return Err(Error::Config(format!("term {a}:{b} needs a > 0 and b > 1")));
            }
        }
        Ok(())
    }

    /// `sum a_i / b_i^alpha`.
    pub fn weight(&self, alpha: f64) -> f64 {
        self.terms.iter().map(|&(a, b)| a / b.powf(alpha)).sum()
    }
}

impl FromStr for RecurrenceSpec {
    type Err = Error;

    /// Parses `a:b,a:b,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("malformed term list '{s}', expected a:b,a:b"));
        let terms = s
            .split(',')
            .map(|t| {
                let (a, b) = t.trim().split_once(':').ok_or_else(bad)?;
                Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        RecurrenceSpec::new(terms)
    }
}

pub const EXPONENT_TOLERANCE: f64 = 1e-9;

/// The unique `alpha` with `sum a_i / b_i^alpha = 1`, by bisection.
pub fn akra_bazzi_exponent(spec: &RecurrenceSpec) -> Result<f64> {
    spec.validate()?;
    let f = |x: f64| spec.weight(x) - 1.0;
    let (mut lo, mut hi) = if f(0.0) >= 0.0 { (0.0, 64.0) } else { (-64.0, 0.0) };
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::Domain("exponent lies outside [-64, 64]".into()));
    }
    while hi - lo > EXPONENT_TOLERANCE / 4.0 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Original,
    Optimized,
}

/// Abstract depths of the linear construction for `0..=max_controls`.
pub fn linear_depth_table(max_controls: usize) -> Vec<usize> {
    (0..=max_controls)
        .map(|k| if k == 0 { 1 } else { mcx_linear(k).map(|c| c.abstract_depth()).unwrap_or(0) })
        .collect()
}

/// Abstract depth of `C^nX` predicted from the base table (entries for
/// `0..table.len()` controls, i.e. base threshold `table.len() - 1`).
///
/// The original variant is the exact recurrence
/// `D(n) = 2 D(2p) + 4 D(p) + 2 D(b+1) + 4`. The optimized variant is an
/// upper bound that charges each parallel column only for the layers left
/// after the boundary cancellations.
pub fn predict_depth(n: usize, table: &[usize], variant: Variant) -> Result<usize> {
    let mut memo = HashMap::new();
    match variant {
        Variant::Original => predict_original(n, table, &mut memo),
        Variant::Optimized => predict_optimized(n, table, &mut memo),
    }
}

fn lookup(n: usize, table: &[usize]) -> Result<usize> {
    table.get(n).copied().ok_or(Error::MissingTableEntry(n))
}

fn recursive_plan(n: usize, table: &[usize]) -> Option<PartitionPlan> {
    if n < table.len() {
        return None;
    }
    PartitionPlan::new(n).ok().filter(PartitionPlan::is_recursive)
}

fn predict_original(n: usize, table: &[usize], memo: &mut HashMap<usize, usize>) -> Result<usize> {
    if let Some(&d) = memo.get(&n) {
        return Ok(d);
    }
    let Some(plan) = recursive_plan(n, table) else { return lookup(n, table) };
    let d = 2 * predict_original(2 * plan.p, table, memo)?
        + 4 * predict_original(plan.max_group(), table, memo)?
        + 2 * predict_original(plan.b + 1, table, memo)?
        + 4;
    memo.insert(n, d);
    Ok(d)
}

/// Depth of `C^nX` under the optimized expansion, bounded from above.
///
/// A parallel column of `C^sX` gates expands into `A B X C X B A B X C X B`
/// per line (`A`, `B`, `C` the grandchild gates). Reversing the first and
/// third columns makes neighbouring expansions meet mirror to mirror, which
/// removes `B A | A B` between columns one and two, `B | B` between two and
/// three and `B A | A B` between three and four. The columns keep 6, 5, 5
/// and 6 of their 8 sub-gate layers. Every node of the recursion is charged
/// this way; the remaining layers are charged their own bound.
fn predict_optimized(n: usize, table: &[usize], memo: &mut HashMap<usize, usize>) -> Result<usize> {
    if let Some(&d) = memo.get(&n) {
        return Ok(d);
    }
    let Some(plan) = recursive_plan(n, table) else { return lookup(n, table) };
    let mut sizes: Vec<usize> = plan.groups.iter().map(Vec::len).collect();
    sizes.dedup();
    // per column, the deepest line
    let mut cols = [0usize; 4];
    for s in sizes {
        let line = match recursive_plan(s, table) {
            None => [predict_optimized(s, table, memo)?; 4],
            Some(sub) => {
                let a = predict_optimized(2 * sub.p, table, memo)?;
                let m = predict_optimized(sub.max_group(), table, memo)?;
                let c = predict_optimized(sub.b + 1, table, memo)?;
                let outer = a + 3 * m + 2 * c + 4;
                let inner = a + 2 * m + 2 * c + 4;
                [outer, inner, inner, outer]
            }
        };
        for (col, d) in cols.iter_mut().zip(line) {
            *col = (*col).max(d);
        }
    }
    let d = 2 * predict_optimized(2 * plan.p, table, memo)?
        + cols.iter().sum::<usize>()
        + 2 * predict_optimized(plan.b + 1, table, memo)?
        + 4;
    memo.insert(n, d);
    Ok(d)
}

/// Smallest `n` such that `a < b` holds at `n` and at every later point.
/// `points` are `(n, a, b)` in increasing `n`.
pub fn find_crossover<T: PartialOrd>(points: &[(usize, T, T)]) -> Option<usize> {
    let mut start = None;
    for (n, a, b) in points.iter().rev() {
        if a < b {
            start = Some(*n);
        } else {
            break;
        }
    }
    start
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_examples() {
        let e = |s: &str| akra_bazzi_exponent(&s.parse().unwrap()).unwrap();
        assert!((e("8:2") - 3.0).abs() < 1e-9);
        assert!((e("1:2")).abs() < 1e-9);
        assert!((e("4:2,22:4") - 2.828).abs() < 1e-3);
        assert!((e("4:2,12:4,60:8") - 2.799).abs() < 1e-3);
        assert!((e("0.25:2") + 2.0).abs() < 1e-9);
    }

    #[test]
    fn exponent_residual_is_small() {
        for s in ["8:2", "4:2,22:4", "4:2,12:4,60:8", "3:1.5,0.5:9"] {
            let spec: RecurrenceSpec = s.parse().unwrap();
            let a = akra_bazzi_exponent(&spec).unwrap();
            assert!((spec.weight(a) - 1.0).abs() <= 1e-8, "{s}");
        }
    }

    #[test]
    fn malformed_terms_are_rejected() {
        for s in ["", "4", "4:1", "-1:2", "a:b", "4:2,"] {
            assert!(s.parse::<RecurrenceSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn crossover_examples() {
        let pts = [(1, 5, 3), (2, 2, 3), (3, 4, 3), (4, 1, 3), (5, 2, 3)];
        assert_eq!(find_crossover(&pts), Some(4));
        let same: Vec<_> = (1..10).map(|n| (n, n, n)).collect();
        assert_eq!(find_crossover(&same), None);
        assert_eq!(find_crossover::<u32>(&[]), None);
    }

    #[test]
    fn table_passthrough_and_missing_entries() {
        let table = linear_depth_table(16);
        for n in 0..=16 {
            assert_eq!(predict_depth(n, &table, Variant::Original).unwrap(), table[n]);
        }
        assert_eq!(predict_depth(5, &table[..4], Variant::Original), Err(Error::MissingTableEntry(5)));
    }

    #[test]
    fn slope_of_a_line() {
        assert!((fit_slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-12);
    }
}
