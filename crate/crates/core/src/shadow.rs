//! Shadowing: the constructive shadow of contracting systems with its error
//! ledger, average-distance profiles, plain checks and a brute-force oracle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ifs::{Ifs, Symbol, SymbolStream};
use crate::orbit::{running_means, validate, PseudoOrbit, ValidationMode};
use crate::spaces::Point;

/// Default fraction of the horizon over which the tail statistic is taken.
pub const DEFAULT_WINDOW: f64 = 0.1;

/// Largest number of symbol words an exhaustive search may enumerate.
pub const SEARCH_BUDGET: u128 = 1_000_000;

/// Theoretical bounds attached to a constructive shadow.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundLedger {
    pub beta: f64,
    /// `d(x₀, y₀)`.
    pub m: f64,
    /// Bound on `d(xᵢ, yᵢ)` for `i = 0 ..= horizon`.
    pub per_step: Vec<f64>,
    /// Bound on `Σ_{i<n} d(xᵢ, yᵢ)` for `n = 1 ..= horizon + 1`.
    pub cumulative: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowReport {
    pub z: Point,
    pub symbols: Vec<Symbol>,
    /// Steps of the target pseudo-orbit; distances cover `x₀ … x_horizon`.
    pub horizon: usize,
    /// `d(F_{σ_i}(z), xᵢ)`.
    pub distances: Vec<f64>,
    /// `S_n` for `n = 1 ..= horizon + 1`.
    pub profile: Vec<f64>,
    pub window: f64,
    pub tail: f64,
    pub bounds: Option<BoundLedger>,
}

impl ShadowReport {
    /// Tail statistic over a different window fraction.
    pub fn tail_over(&self, window: f64) -> Result<f64> {
        tail_statistic(&self.profile, window)
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }

    /// Average over the whole horizon, `S_{horizon+1}`.
    pub fn mean(&self) -> f64 {
        self.profile.last().copied().unwrap_or(0.0)
    }

    /// Largest gap between the stored profile and a recomputation.
    pub fn profile_discrepancy(&self, ifs: &Ifs, orbit: &PseudoOrbit) -> Result<f64> {
        let stream = SymbolStream::Explicit(self.symbols.clone());
        let fresh = shadow_distances(ifs, &self.z, &stream, orbit)?;
        Ok(running_means(&fresh)
            .iter()
            .zip(&self.profile)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Maximum of `profile` over its final `window` fraction (at least one entry).
pub fn tail_statistic(profile: &[f64], window: f64) -> Result<f64> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window fraction {window} outside (0, 1]"
        )));
    }
    if profile.is_empty() {
        return Ok(0.0);
    }
    let count = ((window * profile.len() as f64).ceil() as usize).clamp(1, profile.len());
    Ok(profile[profile.len() - count..]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `d(F_{σ_i}(z), xᵢ)` for every point of the orbit.
fn shadow_distances(ifs: &Ifs, z: &Point, stream: &SymbolStream, orbit: &PseudoOrbit) -> Result<Vec<f64>> {
    if ifs.space() != orbit.space() {
        return Err(Error::SpaceMismatch {
            space: ifs.space().name(),
            point: format!("orbit on {}", orbit.space().name()),
        });
    }
    ifs.space().check(z)?;
    let symbols = stream.take(orbit.horizon())?;
    for &s in &symbols {
        ifs.check_symbol(s)?;
    }
    let space = ifs.space();
    let mut y = z.clone();
    let mut out = Vec::with_capacity(orbit.points().len());
    for (i, x) in orbit.points().iter().enumerate() {
        out.push(space.dist(&y, x));
        if i < symbols.len() {
            y = ifs.image(symbols[i], &y);
        }
    }
    Ok(out)
}

/// Profile of `z` under `σ` against the orbit, with the tail over `window`.
pub fn average_distance_profile(
    ifs: &Ifs,
    z: &Point,
    stream: &SymbolStream,
    orbit: &PseudoOrbit,
    window: f64,
) -> Result<ShadowReport> {
    let distances = shadow_distances(ifs, z, stream, orbit)?;
    let profile = running_means(&distances);
    let tail = tail_statistic(&profile, window)?;
    Ok(ShadowReport {
        z: z.clone(),
        symbols: stream.take(orbit.horizon())?,
        horizon: orbit.horizon(),
        distances,
        profile,
        window,
        tail,
        bounds: None,
    })
}

/// Tail statistic alone, without keeping the profile.
pub fn tail_only(ifs: &Ifs, z: &Point, stream: &SymbolStream, orbit: &PseudoOrbit, window: f64) -> Result<f64> {
    let distances = shadow_distances(ifs, z, stream, orbit)?;
    tail_statistic(&running_means(&distances), window)
}

/// `α_{i−1} + βα_{i−2} + … + β^{i−1}α₀ + βⁱM`.
pub fn error_bound(alpha: &[f64], beta: f64, m: f64, i: usize) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("β = {beta} outside (0, 1)")));
    }
    if i > alpha.len() {
        return Err(Error::InvalidParameter(format!(
            "bound at step {i} needs {i} errors, have {}",
            alpha.len()
        )));
    }
    let mut b = m;
    for a in &alpha[..i] {
        b = a + beta * b;
    }
    Ok(b)
}

fn bound_ledger(alpha: &[f64], beta: f64, m: f64) -> BoundLedger {
    let mut per_step = Vec::with_capacity(alpha.len() + 1);
    let mut b = m;
    per_step.push(b);
    for a in alpha {
        b = a + beta * b;
        per_step.push(b);
    }
    // n = 1 ..= horizon + 1 uses Σ_{i<n−1} α_i
    let mut cumulative = Vec::with_capacity(alpha.len() + 1);
    let mut sum = 0.0;
    cumulative.push(m / (1.0 - beta));
    for a in alpha {
        sum += a;
        cumulative.push((m + sum) / (1.0 - beta));
    }
    BoundLedger {
        beta,
        m,
        per_step,
        cumulative,
    }
}

/// `δ = (1 − β)ε/2`.
pub fn constructive_delta(beta: f64, eps: f64) -> f64 {
    (1.0 - beta) * eps / 2.0
}

/// Shadows the orbit by the true orbit of `x₀` under its own symbols and
/// attaches the telescoped bounds.
pub fn constructive_shadow(ifs: &Ifs, orbit: &PseudoOrbit, eps: f64) -> Result<ShadowReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let beta = ifs.ratio().ok_or_else(|| Error::MissingRatio(ifs.name().to_string()))?;
    let delta = constructive_delta(beta, eps);
    if !validate(orbit, delta, ValidationMode::Average)?.passed() {
        return Err(Error::NotAveragePseudoOrbit { delta });
    }
    let z = orbit.points()[0].clone();
    let stream = SymbolStream::Explicit(orbit.symbols().to_vec());
    let mut report = average_distance_profile(ifs, &z, &stream, orbit, DEFAULT_WINDOW)?;
    report.bounds = Some(bound_ledger(orbit.errors(), beta, 0.0));
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Every word of this length, repeated periodically.
    Exhaustive(usize),
    /// At each step the symbol landing closest to the next orbit point.
    Greedy,
}

/// Best shadowing configuration over `candidates × words`, by the average
/// over the whole horizon. Ties go to the lower candidate index, then the
/// lexicographically smaller word.
pub fn brute_force_search(
    ifs: &Ifs,
    orbit: &PseudoOrbit,
    candidates: &[Point],
    strategy: SearchStrategy,
    horizon: usize,
) -> Result<ShadowReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate points".into()));
    }
    for c in candidates {
        ifs.space().check(c)?;
    }
    let target = orbit.truncate(horizon)?;
    let points = target.points();
    let space = ifs.space();
    let alphabet = ifs.len();

    let per_candidate: Vec<(f64, Vec<Symbol>)> = match strategy {
        SearchStrategy::Exhaustive(h) => {
            if h == 0 {
                return Err(Error::InvalidParameter("word length must be at least 1".into()));
            }
            let needed = (alphabet as u128).checked_pow(h as u32).unwrap_or(u128::MAX);
            if needed > SEARCH_BUDGET {
                return Err(Error::BudgetExceeded {
                    needed,
                    limit: SEARCH_BUDGET,
                });
            }
            let words = needed as usize;
            candidates
                .par_iter()
                .map(|c| {
                    let mut best = (f64::INFINITY, Vec::new());
                    let mut word = vec![0; h];
                    for w in 0..words {
                        let mut rest = w;
                        for slot in word.iter_mut().rev() {
                            *slot = rest % alphabet;
                            rest /= alphabet;
                        }
                        let mut y = c.clone();
                        let mut sum = 0.0;
                        for (i, x) in points.iter().enumerate() {
                            sum += space.dist(&y, x);
                            if i < horizon {
                                y = ifs.image(word[i % h], &y);
                            }
                        }
                        let avg = sum / points.len() as f64;
                        if avg < best.0 {
                            best = (avg, word.clone());
                        }
                    }
                    let symbols = (0..horizon).map(|i| best.1[i % h]).collect();
                    (best.0, symbols)
                })
                .collect()
        }
        SearchStrategy::Greedy => candidates
            .par_iter()
            .map(|c| {
                let mut y = c.clone();
                let mut sum = space.dist(&y, &points[0]);
                let mut symbols = Vec::with_capacity(horizon);
                for x in &points[1..] {
                    let (s, next, d) = (0..alphabet)
                        .map(|s| {
                            let next = ifs.image(s, &y);
                            let d = space.dist(&next, x);
                            (s, next, d)
                        })
                        .fold(None, |acc: Option<(Symbol, Point, f64)>, cur| match acc {
                            Some(a) if a.2 <= cur.2 => Some(a),
                            _ => Some(cur),
                        })
                        .expect("nonempty alphabet");
                    symbols.push(s);
                    sum += d;
                    y = next;
                }
                (sum / points.len() as f64, symbols)
            })
            .collect(),
    };

    let (best_idx, _) =
        per_candidate.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, (avg, _))| if *avg < acc.1 { (i, *avg) } else { acc },
        );
    let stream = SymbolStream::Explicit(per_candidate[best_idx].1.clone());
    average_distance_profile(ifs, &candidates[best_idx], &stream, &target, DEFAULT_WINDOW)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlainShadow {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Whether `sup_n d(xₙ, F_{σ_n}(z)) ≤ ε` over the orbit.
pub fn plain_shadow_check(
    ifs: &Ifs,
    orbit: &PseudoOrbit,
    z: &Point,
    stream: &SymbolStream,
    eps: f64,
) -> Result<PlainShadow> {
    let d = shadow_distances(ifs, z, stream, orbit)?;
    let max_deviation = d.iter().copied().fold(0.0, f64::max);
    Ok(PlainShadow {
        passed: max_deviation <= eps,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{interval_halves, Example};
    use crate::orbit::{exact_orbit, noisy_average_orbit, NoiseModel};

    #[test]
    fn error_bound_values() {
        assert_eq!(error_bound(&[0.0; 3], 0.5, 1.0, 3).unwrap(), 0.125);
        assert_eq!(error_bound(&[0.1, 0.2], 0.5, 0.0, 2).unwrap(), 0.25);
        assert_eq!(error_bound(&[0.3], 0.5, 0.7, 0).unwrap(), 0.7);
        let a = [0.1, 0.0, 0.0];
        let b: Vec<f64> = (1..=3).map(|i| error_bound(&a, 0.5, 0.0, i).unwrap()).collect();
        assert_eq!(b, vec![0.1, 0.05, 0.025]);
        assert!(error_bound(&a, 0.5, 0.0, 4).is_err());
        assert!(error_bound(&a, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn constructive_delta_value() {
        assert_eq!(constructive_delta(0.5, 0.1), 0.025);
    }

    #[test]
    fn tail_window() {
        let p: Vec<f64> = (1..=100).map(|n| 1.0 / n as f64).collect();
        assert_eq!(tail_statistic(&p, 0.1).unwrap(), 1.0 / 91.0);
        assert_eq!(tail_statistic(&p, 1.0).unwrap(), 1.0);
        assert_eq!(tail_statistic(&p[..3], 0.1).unwrap(), 1.0 / 3.0);
        assert!(tail_statistic(&p, 0.0).is_err());
    }

    #[test]
    fn exact_orbit_is_its_own_shadow() {
        let s = Example::Sierpinski.make().unwrap();
        let o = exact_orbit(
            &s,
            &Point::Pair(0.4, 0.2),
            &SymbolStream::Random { seed: 2, alphabet: 3 },
            200,
        )
        .unwrap();
        let r = constructive_shadow(&s, &o, 0.01).unwrap();
        assert!(r.distances.iter().all(|&d| d == 0.0));
        assert_eq!(r.tail, 0.0);
        let p = plain_shadow_check(
            &s,
            &o,
            &o.points()[0],
            &SymbolStream::Explicit(o.symbols().to_vec()),
            1e-300,
        )
        .unwrap();
        assert!(p.passed);
    }

    #[test]
    fn constant_orbit_at_fixed_point() {
        let s = Example::Sierpinski.make().unwrap();
        let b = Point::Pair(1.0, 0.0);
        let o = exact_orbit(&s, &b, &SymbolStream::Constant(1), 50).unwrap();
        let r = average_distance_profile(&s, &b, &SymbolStream::Constant(1), &o, 0.1).unwrap();
        assert_eq!(r.tail, 0.0);
    }

    #[test]
    fn ledger_dominates_realized_distances() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.3, 0.3),
            &SymbolStream::Random { seed: 7, alphabet: 3 },
            3000,
            0.025,
            NoiseModel::Uniform,
            11,
        )
        .unwrap();
        let r = constructive_shadow(&s, &o, 0.1).unwrap();
        let ledger = r.bounds.as_ref().unwrap();
        let mut sum = 0.0;
        for (i, d) in r.distances.iter().enumerate() {
            assert!(*d <= ledger.per_step[i] + 1e-9, "step {i}");
            sum += d;
            assert!(sum <= ledger.cumulative[i] + 1e-9, "cumulative {i}");
        }
        assert!(r.tail < 0.1);
        assert!(r.profile_discrepancy(&s, &o).unwrap() <= 1e-12);
    }

    #[test]
    fn constructive_shadow_preconditions() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.3, 0.3),
            &SymbolStream::Constant(0),
            100,
            0.2,
            NoiseModel::Uniform,
            1,
        )
        .unwrap();
        assert!(matches!(
            constructive_shadow(&s, &o, 0.01),
            Err(Error::NotAveragePseudoOrbit { .. })
        ));
        let circle = Example::CircleCounterexample(0.5).make().unwrap();
        let c = exact_orbit(&circle, &Point::Real(0.2), &SymbolStream::Constant(0), 10).unwrap();
        assert!(matches!(
            constructive_shadow(&circle, &c, 0.1),
            Err(Error::MissingRatio(_))
        ));
    }

    fn frozen_interval_orbit() -> (Ifs, PseudoOrbit) {
        let f = interval_halves();
        let points: Vec<Point> = [0.3, 0.16, 0.58, 0.31, 0.62, 0.8, 0.41]
            .iter()
            .map(|&x| Point::Real(x))
            .collect();
        let o = PseudoOrbit::from_points(&f, points, vec![0, 1, 0, 1, 1, 0]).unwrap();
        (f, o)
    }

    #[test]
    fn exhaustive_oracle_regression() {
        let (f, o) = frozen_interval_orbit();
        let grid: Vec<Point> = (0..64).map(|k| Point::Real((k as f64 + 0.5) / 64.0)).collect();
        let r = brute_force_search(&f, &o, &grid, SearchStrategy::Exhaustive(6), 6).unwrap();
        assert!((r.mean() - 0.012165876116071422).abs() < 1e-12);
        assert_eq!(r.z, Point::Real(19.5 / 64.0));
        assert_eq!(r.symbols, vec![0, 1, 0, 1, 1, 0]);
    }

    #[test]
    fn exhaustive_budget() {
        let (f, o) = frozen_interval_orbit();
        let r = brute_force_search(&f, &o, &[Point::Real(0.3)], SearchStrategy::Exhaustive(20), 6);
        assert!(matches!(r, Err(Error::BudgetExceeded { needed: 1048576, .. })));
    }

    #[test]
    fn oracle_dominates_constructive() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.6, 0.1),
            &SymbolStream::Random { seed: 3, alphabet: 3 },
            7,
            0.02,
            NoiseModel::Uniform,
            5,
        )
        .unwrap();
        let c = constructive_shadow(&s, &o, 0.1).unwrap();
        let candidates = vec![Point::Pair(0.2, 0.1), o.points()[0].clone(), Point::Pair(0.5, 0.5)];
        let b = brute_force_search(&s, &o, &candidates, SearchStrategy::Exhaustive(7), 7).unwrap();
        assert!(b.mean() <= c.mean() + 1e-15);
        let g = brute_force_search(&s, &o, &candidates, SearchStrategy::Greedy, 7).unwrap();
        assert!(b.mean() <= g.mean() + 1e-15);
    }

    #[test]
    fn exact_orbit_oracle_finds_zero() {
        let f = interval_halves();
        let o = exact_orbit(&f, &Point::Real(0.375), &SymbolStream::Periodic(vec![1, 0, 0]), 8).unwrap();
        let grid: Vec<Point> = (0..8).map(|k| Point::Real(k as f64 / 8.0)).collect();
        let r = brute_force_search(&f, &o, &grid, SearchStrategy::Exhaustive(3), 8).unwrap();
        assert_eq!(r.mean(), 0.0);
        assert_eq!(r.z, Point::Real(0.375));
    }

    #[test]
    fn bursty_sierpinski_plain_versus_average() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.5, 0.2),
            &SymbolStream::Random { seed: 1, alphabet: 3 },
            10_000,
            0.1,
            NoiseModel::Bursty { jump: 0.4, period: 8 },
            1,
        )
        .unwrap();
        let z = o.points()[0].clone();
        let sigma = SymbolStream::Explicit(o.symbols().to_vec());
        let plain = plain_shadow_check(&s, &o, &z, &sigma, 0.1).unwrap();
        let avg = average_distance_profile(&s, &z, &sigma, &o, DEFAULT_WINDOW).unwrap();
        assert!(!plain.passed);
        assert!(avg.tail < 0.1);
        assert!(
            (plain.max_deviation - BURSTY_MAX).abs() < 1e-12,
            "{}",
            plain.max_deviation
        );
        assert!((avg.tail - BURSTY_TAIL).abs() < 1e-12, "{}", avg.tail);
    }

    const BURSTY_MAX: f64 = 0.4007511000644602;
    const BURSTY_TAIL: f64 = 0.07473707745041219;
}
