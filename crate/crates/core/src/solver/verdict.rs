//! Long-time classification of a computed trajectory.

use super::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Verdict {
    ConvergesToZero,
    Bounded,
    Diverges,
    Inconclusive,
}

/// Classifies `traj` from the sup norm over its final `tail_fraction` of time.
///
/// * `Diverges`: the solver stopped at the ceiling or some norm reached it.
/// * `ConvergesToZero`: the tail stays below `tol_zero`.
/// * `Inconclusive`: the tail still grows, ending above twice its starting
///   norm and at its own maximum.
/// * `Bounded`: otherwise.
pub fn asymptotic_verdict(
    traj: &Trajectory,
    tail_fraction: f64,
    tol_zero: f64,
    ceiling: f64,
) -> Verdict {
    if traj.diverged() {
        return Verdict::Diverges;
    }
    if traj.len() < 2 || !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Verdict::Inconclusive;
    }
    let norms = traj.norms();
    if norms.iter().any(|&v| !(v < ceiling)) {
        return Verdict::Diverges;
    }
    let t_end = traj.final_time();
    let start = traj
        .times
        .partition_point(|&t| t < t_end * (1.0 - tail_fraction));
    let tail = &norms[start.min(norms.len() - 1)..];
    let sup = tail.iter().copied().fold(0.0, f64::max);
    if sup < tol_zero {
        return Verdict::ConvergesToZero;
    }
    let (first, last) = (tail[0], tail[tail.len() - 1]);
    if tail.len() >= 2 && last >= sup && last > 2.0 * first {
        return Verdict::Inconclusive;
    }
    Verdict::Bounded
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;
    use crate::solver::{solve_ivp, OrderSpec, SystemSpec};
    use alloc::vec;

    fn run(lambda: f64, t: f64) -> Trajectory {
        let spec = SystemSpec::linear(
            OrderSpec::uniform(1.0, 1).unwrap(),
            Mat::from_rows(&[[lambda]]).unwrap(),
            vec![1.0],
        );
        solve_ivp(&spec, t, 0.01).unwrap()
    }

    #[test]
    fn classes() {
        assert_eq!(
            asymptotic_verdict(&run(-2.0, 20.0), 0.1, 1e-6, 1e9),
            Verdict::ConvergesToZero
        );
        assert_eq!(
            asymptotic_verdict(&run(0.0, 20.0), 0.1, 1e-6, 1e9),
            Verdict::Bounded
        );
        assert_eq!(
            asymptotic_verdict(&run(3.0, 20.0), 0.1, 1e-6, 1e9),
            Verdict::Diverges
        );
        assert_eq!(
            asymptotic_verdict(&run(0.5, 20.0), 0.1, 1e-6, 1e9),
            Verdict::Inconclusive
        );
    }
}
