//! Pseudo-orbits: generation, the per-step error ledger and validation.
//!
//! All sequences are finite. A statement such as "for all n ≥ N" is only
//! checked up to the stored horizon.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ifs::{power_word, Ifs, Symbol, SymbolStream};
use crate::spaces::{Point, Space};

/// Tolerance when comparing a stored error ledger to recomputed values.
pub const LEDGER_TOL: f64 = 1e-12;

/// Points `x₀ … xₙ`, symbols `λ₀ … λₙ₋₁` and errors `αᵢ = d(f_{λᵢ}(xᵢ), xᵢ₊₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoOrbit {
    space: Space,
    points: Vec<Point>,
    symbols: Vec<Symbol>,
    errors: Vec<f64>,
}

impl PseudoOrbit {
    /// Builds the orbit and its error ledger against `ifs`.
    pub fn from_points(ifs: &Ifs, points: Vec<Point>, symbols: Vec<Symbol>) -> Result<Self> {
        if points.is_empty() || points.len() != symbols.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} points need {} symbols, got {}",
                points.len(),
                points.len().saturating_sub(1),
                symbols.len()
            )));
        }
        for p in &points {
            ifs.space().check(p)?;
        }
        for &s in &symbols {
            ifs.check_symbol(s)?;
        }
        let errors = step_errors(ifs, &points, &symbols);
        Ok(Self {
            space: ifs.space().clone(),
            points,
            symbols,
            errors,
        })
    }

    /// Reassembles an orbit from stored columns without recomputation.
    pub fn from_parts(space: Space, points: Vec<Point>, symbols: Vec<Symbol>, errors: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != symbols.len() + 1 || errors.len() != symbols.len() {
            return Err(Error::InvalidParameter("pseudo-orbit column lengths disagree".into()));
        }
        for p in &points {
            space.check(p)?;
        }
        Ok(Self {
            space,
            points,
            symbols,
            errors,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    /// Number of steps (one less than the number of points).
    pub fn horizon(&self) -> usize {
        self.symbols.len()
    }

    /// The first `steps` steps.
    pub fn truncate(&self, steps: usize) -> Result<Self> {
        if steps > self.horizon() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate horizon {} to {steps}",
                self.horizon()
            )));
        }
        Ok(Self {
            space: self.space.clone(),
            points: self.points[..=steps].to_vec(),
            symbols: self.symbols[..steps].to_vec(),
            errors: self.errors[..steps].to_vec(),
        })
    }

    /// Largest gap between the stored ledger and a recomputation against `ifs`.
    pub fn ledger_discrepancy(&self, ifs: &Ifs) -> Result<f64> {
        if ifs.space() != &self.space {
            return Err(Error::SpaceMismatch {
                space: ifs.space().name(),
                point: format!("orbit on {}", self.space.name()),
            });
        }
        for &s in &self.symbols {
            ifs.check_symbol(s)?;
        }
        let fresh = step_errors(ifs, &self.points, &self.symbols);
        Ok(fresh
            .iter()
            .zip(&self.errors)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Running averages `Aₙ = (1/n) Σ_{i<n} αᵢ` for `n = 1 ..= horizon`.
    pub fn running_averages(&self) -> Vec<f64> {
        running_means(&self.errors)
    }
}

fn step_errors(ifs: &Ifs, points: &[Point], symbols: &[Symbol]) -> Vec<f64> {
    symbols
        .iter()
        .enumerate()
        .map(|(i, &s)| ifs.space().dist(&ifs.image(s, &points[i]), &points[i + 1]))
        .collect()
}

/// `(1/n) Σ_{i<n} vᵢ` for `n = 1 ..= v.len()`.
pub fn running_means(values: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            sum += v;
            sum / (i + 1) as f64
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    /// Every step error below δ.
    Plain,
    /// Running averages from index 0 eventually below δ.
    Average,
    /// Averages over every window start eventually below δ.
    AverageShifted,
}

/// Outcome of an average-mode validation.
#[derive(Clone, Debug, PartialEq)]
pub struct AverageValidation {
    pub delta: f64,
    /// Smallest `N ≥ 1` with every checked average below δ for `N ≤ n ≤ horizon`.
    pub first_index: Option<usize>,
    /// `Aₙ` for `n = 1 ..= horizon`; in shifted mode, the worst window average of each length.
    pub profile: Vec<f64>,
    pub horizon: usize,
}

impl AverageValidation {
    pub fn passed(&self) -> bool {
        self.first_index.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Plain { passed: bool, max_error: f64 },
    Average(AverageValidation),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        match self {
            Verdict::Plain { passed, .. } => *passed,
            Verdict::Average(v) => v.passed(),
        }
    }

    pub fn first_index(&self) -> Option<usize> {
        match self {
            Verdict::Plain { .. } => None,
            Verdict::Average(v) => v.first_index,
        }
    }
}

/// Smallest `N ≥ 1` such that `profile[n-1] < delta` for every `n ≥ N`.
fn tail_start(profile: &[f64], delta: f64) -> Option<usize> {
    match profile.iter().rposition(|&a| a >= delta) {
        None => Some(1),
        Some(last_bad) if last_bad + 1 == profile.len() => None,
        Some(last_bad) => Some(last_bad + 2),
    }
}

/// Validates the stored error ledger at `delta`.
pub fn validate(orbit: &PseudoOrbit, delta: f64, mode: ValidationMode) -> Result<Verdict> {
    validate_errors(orbit.errors(), delta, mode)
}

/// [`validate`] on a bare error sequence.
pub fn validate_errors(errors: &[f64], delta: f64, mode: ValidationMode) -> Result<Verdict> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
    }
    Ok(match mode {
        ValidationMode::Plain => {
            let max_error = errors.iter().copied().fold(0.0, f64::max);
            Verdict::Plain {
                passed: errors.iter().all(|&a| a < delta),
                max_error,
            }
        }
        ValidationMode::Average => {
            let profile = running_means(errors);
            Verdict::Average(AverageValidation {
                delta,
                first_index: tail_start(&profile, delta),
                profile,
                horizon: errors.len(),
            })
        }
        ValidationMode::AverageShifted => {
            let mut prefix = Vec::with_capacity(errors.len() + 1);
            prefix.push(0.0);
            for a in errors {
                prefix.push(prefix.last().copied().unwrap_or(0.0) + a);
            }
            let h = errors.len();
            let profile: Vec<f64> = (1..=h)
                .map(|n| {
                    (0..=h - n)
                        .map(|k| prefix[k + n] - prefix[k])
                        .fold(f64::NEG_INFINITY, f64::max)
                        / n as f64
                })
                .collect();
            Verdict::Average(AverageValidation {
                delta,
                first_index: tail_start(&profile, delta),
                profile,
                horizon: h,
            })
        }
    })
}

/// The exact orbit `xᵢ₊₁ = f_{λᵢ}(xᵢ)` for `n` steps.
pub fn exact_orbit(ifs: &Ifs, start: &Point, stream: &SymbolStream, n: usize) -> Result<PseudoOrbit> {
    ifs.space().check(start)?;
    let symbols = stream.take(n)?;
    for &s in &symbols {
        ifs.check_symbol(s)?;
    }
    let mut points = Vec::with_capacity(n + 1);
    points.push(start.clone());
    for &s in &symbols {
        let next = ifs.image(s, points.last().expect("nonempty"));
        points.push(next);
    }
    Ok(PseudoOrbit {
        space: ifs.space().clone(),
        errors: vec![0.0; n],
        points,
        symbols,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    /// Every step displaced by less than `0.9·δ`.
    Uniform,
    /// A displacement of size at most `jump` at steps `T−1, 2T−1, …`, exact
    /// steps otherwise.
    Bursty { jump: f64, period: usize },
}

/// A δ-average pseudo-orbit built by perturbing an orbit.
///
/// Bursts land at the end of each period, so `Aₙ ≤ ⌊n/T⌋·J/n ≤ J/T < δ`
/// for every `n` and the result validates with `N = 1`.
pub fn noisy_average_orbit(
    ifs: &Ifs,
    start: &Point,
    stream: &SymbolStream,
    n: usize,
    delta: f64,
    model: NoiseModel,
    seed: u64,
) -> Result<PseudoOrbit> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
    }
    if let NoiseModel::Bursty { jump, period } = model {
        if period == 0 || !(jump >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "burst size {jump} every {period} steps"
            )));
        }
        if jump / period as f64 >= delta {
            return Err(Error::InvalidParameter(format!(
                "bursts J/T = {} are not below δ = {delta}",
                jump / period as f64
            )));
        }
    }
    ifs.space().check(start)?;
    let symbols = stream.take(n)?;
    for &s in &symbols {
        ifs.check_symbol(s)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = ifs.space();
    let mut points = Vec::with_capacity(n + 1);
    points.push(start.clone());
    for (i, &s) in symbols.iter().enumerate() {
        let image = ifs.image(s, &points[i]);
        let size = match model {
            NoiseModel::Uniform => 0.9 * delta * rng.gen::<f64>(),
            NoiseModel::Bursty { jump, period } => {
                if (i + 1) % period == 0 {
                    jump * rng.gen_range(0.5..=1.0)
                } else {
                    0.0
                }
            }
        };
        points.push(space.displace(&image, size, &mut rng));
    }
    let orbit = PseudoOrbit::from_points(ifs, points, symbols)?;
    if !validate(&orbit, delta, ValidationMode::Average)?.passed() {
        return Err(Error::NotAveragePseudoOrbit { delta });
    }
    Ok(orbit)
}

/// Value of the doubling-block sequence at index `i`: `b` on `[0, K]`, `c`
/// on `[K+1, 3K]`, then alternating on `[3·2ʲK + 1, 3·2ʲ⁺¹K]` with `b` for
/// even `j`.
pub fn block_uses_first(i: usize, k: usize) -> bool {
    if i <= k {
        return true;
    }
    if i <= 3 * k {
        return false;
    }
    let mut j = 0;
    let mut upper = 6 * k;
    while i > upper {
        upper *= 2;
        j += 1;
    }
    j % 2 == 0
}

/// Points `x₀ … x_horizon` of the doubling-block sequence between `b` and `c`.
pub fn block_switching_points(b: &Point, c: &Point, k: usize, horizon: usize) -> Result<Vec<Point>> {
    if k == 0 {
        return Err(Error::InvalidParameter("block length K must be at least 1".into()));
    }
    if b == c {
        return Err(Error::InvalidParameter("block endpoints must differ".into()));
    }
    if horizon < 3 * k {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is shorter than 3K = {}",
            3 * k
        )));
    }
    Ok((0..=horizon)
        .map(|i| if block_uses_first(i, k) { b.clone() } else { c.clone() })
        .collect())
}

/// The doubling-block sequence as a pseudo-orbit of `ifs` with every symbol
/// equal to `symbol`.
pub fn block_switching_orbit(
    ifs: &Ifs,
    b: &Point,
    c: &Point,
    k: usize,
    horizon: usize,
    symbol: Symbol,
) -> Result<PseudoOrbit> {
    let points = block_switching_points(b, c, k, horizon)?;
    PseudoOrbit::from_points(ifs, points, vec![symbol; horizon])
}

/// How the backward chain `y₁, y₂, …` ending at `y` is obtained.
#[derive(Clone, Debug)]
pub enum BackwardChain {
    /// Registered inverses: the chosen symbol first, then the other symbols
    /// in order when its preimage is unavailable.
    Inverse,
    /// Entry `i` is `(yᵢ₊₁, μ)` with `f_μ(yᵢ₊₁) = yᵢ` and `y₀ = y`.
    Supplied(Vec<(Point, Symbol)>),
}

/// Periodic pseudo-orbit of period `2N₀` running from `x` forward under
/// `f_λ` for `N₀` steps, jumping to the backward chain of `y`, descending it
/// to `y`, and jumping back to `x`.
///
/// If `y` lies on the first `N₀` forward iterates of `x`, the ordinary orbit
/// loop from `x` to `y` is returned instead.
pub fn cyclic_connecting_orbit(
    ifs: &Ifs,
    x: &Point,
    y: &Point,
    symbol: Symbol,
    n0: usize,
    horizon: usize,
    chain: &BackwardChain,
) -> Result<PseudoOrbit> {
    if n0 < 3 {
        return Err(Error::InvalidParameter(format!("N₀ must be at least 3, got {n0}")));
    }
    ifs.check_symbol(symbol)?;
    let space = ifs.space();
    space.check(x)?;
    space.check(y)?;

    let mut forward = Vec::with_capacity(n0 + 1);
    forward.push(x.clone());
    for _ in 0..n0 {
        let next = ifs.image(symbol, forward.last().expect("nonempty"));
        forward.push(next);
    }
    if let Some(j) = forward.iter().position(|p| space.dist(p, y) <= 1e-12) {
        let cycle: Vec<(Point, Symbol)> = forward[..=j].iter().map(|p| (p.clone(), symbol)).collect();
        return periodic_orbit(ifs, &cycle, horizon);
    }

    // backward[i] = (y_{i+1}, μ) with f_μ(y_{i+1}) = y_i
    let need = n0 - 2;
    let backward: Vec<(Point, Symbol)> = match chain {
        BackwardChain::Supplied(v) => {
            if v.len() < need {
                return Err(Error::InvalidParameter(format!(
                    "backward chain has {} points, need {need}",
                    v.len()
                )));
            }
            v[..need].to_vec()
        }
        BackwardChain::Inverse => {
            let mut out: Vec<(Point, Symbol)> = Vec::with_capacity(need);
            let mut current = y.clone();
            for _ in 0..need {
                let order = std::iter::once(symbol).chain((0..ifs.len()).filter(|&s| s != symbol));
                let found = order
                    .filter_map(|s| ifs.preimage(s, &current).ok().map(|p| (p, s)))
                    .next()
                    .ok_or_else(|| Error::PreimageUnavailable {
                        symbol,
                        point: current.to_string(),
                    })?;
                current = found.0.clone();
                out.push(found);
            }
            out
        }
    };

    // one period: forward x … f^{N₀}(x), then y_{N₀−2} … y₁, then y
    let mut cycle: Vec<(Point, Symbol)> = forward.into_iter().map(|p| (p, symbol)).collect();
    for (p, mu) in backward.iter().rev() {
        cycle.push((p.clone(), *mu));
    }
    cycle.push((y.clone(), symbol));
    debug_assert_eq!(cycle.len(), 2 * n0);
    periodic_orbit(ifs, &cycle, horizon)
}

/// Repeats `(point, outgoing symbol)` pairs periodically for `horizon` steps.
fn periodic_orbit(ifs: &Ifs, cycle: &[(Point, Symbol)], horizon: usize) -> Result<PseudoOrbit> {
    let period = cycle.len();
    let points = (0..=horizon).map(|i| cycle[i % period].0.clone()).collect();
    let symbols = (0..horizon).map(|i| cycle[i % period].1).collect();
    PseudoOrbit::from_points(ifs, points, symbols)
}

/// Interleaves a pseudo-orbit of `F^k` with the intermediate images
/// `f_{λʲ} ∘ … ∘ f_{λ⁰}(xₙ)`, giving a pseudo-orbit of `F` of horizon `k·n`.
pub fn refine_power_orbit(base: &Ifs, k: usize, orbit: &PseudoOrbit) -> Result<PseudoOrbit> {
    if k == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(orbit.horizon() * k + 1);
    let mut symbols = Vec::with_capacity(orbit.horizon() * k);
    for (x, &mu) in orbit.points().iter().zip(orbit.symbols()) {
        let word = power_word(base.len(), k, mu);
        let mut y = x.clone();
        for (j, &s) in word.iter().enumerate() {
            points.push(y.clone());
            symbols.push(s);
            if j + 1 < k {
                y = base.image(s, &y);
            }
        }
    }
    points.push(orbit.points().last().expect("nonempty").clone());
    PseudoOrbit::from_points(base, points, symbols)
}

/// Pairs two pseudo-orbits into one of `product_ifs(f, g)`.
pub fn zip_product_orbit(product: &Ifs, a: &PseudoOrbit, b: &PseudoOrbit, g_len: usize) -> Result<PseudoOrbit> {
    if a.horizon() != b.horizon() {
        return Err(Error::InvalidParameter("factor orbits have different horizons".into()));
    }
    let points = a
        .points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| Point::pair(p.clone(), q.clone()))
        .collect();
    let symbols = a
        .symbols()
        .iter()
        .zip(b.symbols())
        .map(|(&s, &t)| s * g_len + t)
        .collect();
    PseudoOrbit::from_points(product, points, symbols)
}

/// Splits a pseudo-orbit of `product_ifs(f, g)` into its coordinate orbits.
pub fn split_product_orbit(orbit: &PseudoOrbit, f: &Ifs, g: &Ifs) -> Result<(PseudoOrbit, PseudoOrbit)> {
    let mut pa = Vec::with_capacity(orbit.points().len());
    let mut pb = Vec::with_capacity(orbit.points().len());
    for p in orbit.points() {
        let (a, b) = p.components().ok_or_else(|| Error::SpaceMismatch {
            space: "product".into(),
            point: p.to_string(),
        })?;
        pa.push(a.clone());
        pb.push(b.clone());
    }
    let sa = orbit.symbols().iter().map(|s| s / g.len()).collect();
    let sb = orbit.symbols().iter().map(|s| s % g.len()).collect();
    Ok((
        PseudoOrbit::from_points(f, pa, sa)?,
        PseudoOrbit::from_points(g, pb, sb)?,
    ))
}

/// Maps every point through `h` and rebuilds the ledger against `target`.
pub fn transport_orbit<H>(orbit: &PseudoOrbit, target: &Ifs, h: H) -> Result<PseudoOrbit>
where
    H: Fn(&Point) -> Point,
{
    let points = orbit.points().iter().map(h).collect();
    PseudoOrbit::from_points(target, points, orbit.symbols().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{sierpinski_address_point, Example};

    fn errors_verdict(errors: &[f64], delta: f64, mode: ValidationMode) -> Verdict {
        validate_errors(errors, delta, mode).unwrap()
    }

    #[test]
    fn exact_orbit_of_length_zero() {
        let s = Example::Sierpinski.make().unwrap();
        let o = exact_orbit(&s, &Point::Pair(0.3, 0.1), &SymbolStream::Constant(0), 0).unwrap();
        assert_eq!(o.points().len(), 1);
        assert!(o.errors().is_empty());
    }

    #[test]
    fn sierpinski_fixed_points_give_constant_orbits() {
        let s = Example::Sierpinski.make().unwrap();
        let o = exact_orbit(&s, &Point::Pair(0.0, 0.0), &SymbolStream::Constant(0), 5).unwrap();
        assert!(o.points().iter().all(|p| *p == Point::Pair(0.0, 0.0)));
        let o = exact_orbit(&s, &Point::Pair(1.0, 0.0), &SymbolStream::Constant(1), 2).unwrap();
        assert_eq!(
            o.points(),
            &[Point::Pair(1.0, 0.0), Point::Pair(1.0, 0.0), Point::Pair(1.0, 0.0)]
        );
        assert_eq!(
            validate(&o, 0.01, ValidationMode::Average).unwrap().first_index(),
            Some(1)
        );
    }

    #[test]
    fn single_burst_average_index() {
        let mut errors = vec![0.0; 20];
        errors[0] = 0.4;
        assert!(!errors_verdict(&errors, 0.1, ValidationMode::Plain).passed());
        let v = errors_verdict(&errors, 0.1, ValidationMode::Average);
        assert_eq!(v.first_index(), Some(5));
    }

    #[test]
    fn constant_errors_at_delta_fail() {
        let v = errors_verdict(&[0.25; 50], 0.25, ValidationMode::Average);
        assert_eq!(v.first_index(), None);
        assert!(validate_errors(&[0.0], 0.0, ValidationMode::Plain).is_err());
    }

    #[test]
    fn shifted_mode_sees_late_bursts() {
        // a late burst passes from-zero averaging but not every window
        let mut errors = vec![0.0; 100];
        errors[90] = 0.5;
        let plain_avg = errors_verdict(&errors, 0.1, ValidationMode::Average);
        assert_eq!(plain_avg.first_index(), Some(1));
        let shifted = errors_verdict(&errors, 0.1, ValidationMode::AverageShifted);
        assert_eq!(shifted.first_index(), Some(6));
    }

    #[test]
    fn uniform_noise_stays_below_ninety_percent() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.5, 0.2),
            &SymbolStream::Random { seed: 3, alphabet: 3 },
            2000,
            0.1,
            NoiseModel::Uniform,
            8,
        )
        .unwrap();
        assert!(o.errors().iter().all(|&a| a < 0.09));
        assert!(o.running_averages().iter().all(|&a| a < 0.1));
    }

    #[test]
    fn bursty_noise_averages() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.5, 0.2),
            &SymbolStream::Random { seed: 4, alphabet: 3 },
            4000,
            0.1,
            NoiseModel::Bursty { jump: 0.4, period: 8 },
            1,
        )
        .unwrap();
        let last = *o.running_averages().last().unwrap();
        assert!(last <= 0.05 + 1e-12);
        assert_eq!(
            validate(&o, 0.1, ValidationMode::Average).unwrap().first_index(),
            Some(1)
        );
        assert!(!validate(&o, 0.1, ValidationMode::Plain).unwrap().passed());
    }

    #[test]
    fn infeasible_bursts_are_rejected() {
        let s = Example::Sierpinski.make().unwrap();
        let r = noisy_average_orbit(
            &s,
            &Point::Pair(0.5, 0.2),
            &SymbolStream::Constant(0),
            10,
            0.1,
            NoiseModel::Bursty { jump: 0.4, period: 2 },
            1,
        );
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn block_sequence_layout() {
        let b = Point::Real(0.0);
        let c = Point::Real(0.5);
        let pts = block_switching_points(&b, &c, 2, 24).unwrap();
        let pattern: String = pts.iter().map(|p| if *p == b { 'b' } else { 'c' }).collect();
        assert_eq!(pattern, "bbbccccbbbbbbcccccccccccc");
        assert!(block_switching_points(&b, &b, 2, 24).is_err());
        assert!(block_switching_points(&b, &c, 2, 5).is_err());
    }

    #[test]
    fn block_orbit_average_bound() {
        let sys = Example::CircleCounterexample(0.5).make().unwrap();
        let k = 8;
        let o = block_switching_orbit(&sys, &Point::Real(0.0), &Point::Real(0.5), k, 3 * 1024 * k, 0).unwrap();
        let bound = 3.0 * 0.5 / k as f64;
        for (i, a) in o.running_averages().iter().enumerate() {
            if i + 1 > k {
                assert!(*a < bound);
            }
        }
    }

    #[test]
    fn cyclic_orbit_on_circle() {
        let sys = Example::CircleCounterexample(0.5).make().unwrap();
        let (x, y) = (Point::Real(0.1), Point::Real(0.7));
        let n0 = 16;
        let o = cyclic_connecting_orbit(&sys, &x, &y, 0, n0, 20 * n0, &BackwardChain::Inverse).unwrap();
        for i in (0..o.points().len()).step_by(2 * n0) {
            assert_eq!(o.points()[i], x);
        }
        assert_eq!(o.points()[2 * n0 - 1], y);
        // zero error along the forward and backward legs
        let nonzero = o.errors()[..2 * n0].iter().filter(|&&a| a > 1e-12).count();
        assert!(nonzero <= 2, "{nonzero}");
        let v = validate(&o, 3.0 * 0.5 / n0 as f64, ValidationMode::Average).unwrap();
        assert!(v.passed());
    }

    #[test]
    fn cyclic_orbit_degenerates_to_orbit_loop() {
        let sys = Example::CircleCounterexample(0.5).make().unwrap();
        let x = Point::Real(0.1);
        let y = sys.apply(0, &sys.apply(0, &x).unwrap()).unwrap();
        let o = cyclic_connecting_orbit(&sys, &x, &y, 0, 8, 12, &BackwardChain::Inverse).unwrap();
        assert_eq!(o.points()[3], x);
        assert_eq!(o.points()[2], y);
    }

    #[test]
    fn cyclic_orbit_needs_preimages() {
        let s = Example::Sierpinski.make().unwrap();
        // the centroid region of the triangle has no preimage under any map
        let r = cyclic_connecting_orbit(
            &s,
            &Point::Pair(0.1, 0.05),
            &Point::Pair(0.5, 0.3),
            0,
            8,
            40,
            &BackwardChain::Inverse,
        );
        assert!(matches!(r, Err(Error::PreimageUnavailable { .. })));
        assert!(cyclic_connecting_orbit(
            &s,
            &Point::Pair(0.1, 0.05),
            &Point::Pair(0.5, 0.3),
            0,
            2,
            40,
            &BackwardChain::Inverse
        )
        .is_err());
    }

    #[test]
    fn cyclic_orbit_with_supplied_chain() {
        let s = Example::Sierpinski.make().unwrap();
        let n0 = 16;
        let address: Vec<usize> = (0..n0).map(|i| (i * 7 + 1) % 3).collect();
        let (y, chain) = sierpinski_address_point(&address, &Point::Pair(0.4, 0.3));
        let x = Point::Pair(0.9, 0.05);
        let o = cyclic_connecting_orbit(&s, &x, &y, 2, n0, 10 * n0, &BackwardChain::Supplied(chain)).unwrap();
        let big = o.errors().iter().filter(|&&a| a > 1e-12).count();
        assert_eq!(big, 10);
        assert!(validate(&o, 3.0 / n0 as f64, ValidationMode::Average).unwrap().passed());
    }

    #[test]
    fn refinement_of_power_orbit() {
        let f = Example::Sigma2Shift.make().unwrap();
        let f2 = crate::ifs::power_ifs(&f, 2).unwrap();
        let start = Point::Seq(crate::spaces::BinarySeq::constant(0));
        let o = noisy_average_orbit(
            &f2,
            &start,
            &SymbolStream::Random { seed: 5, alphabet: 4 },
            50,
            0.1,
            NoiseModel::Uniform,
            2,
        )
        .unwrap();
        let r = refine_power_orbit(&f, 2, &o).unwrap();
        assert_eq!(r.horizon(), 100);
        for n in 0..=50 {
            assert_eq!(r.points()[2 * n], o.points()[n]);
        }
        for n in 0..50 {
            assert_eq!(r.errors()[2 * n], 0.0);
            assert!((r.errors()[2 * n + 1] - o.errors()[n]).abs() < 1e-15);
        }
    }

    #[test]
    fn product_zip_and_split() {
        let f = crate::catalog::interval_halves();
        let g = Example::Sigma2Shift.make().unwrap();
        let h = crate::ifs::product_ifs(&f, &g);
        let a = noisy_average_orbit(
            &f,
            &Point::Real(0.3),
            &SymbolStream::Random { seed: 1, alphabet: 2 },
            30,
            0.05,
            NoiseModel::Uniform,
            1,
        )
        .unwrap();
        let b = noisy_average_orbit(
            &g,
            &Point::Seq(crate::spaces::BinarySeq::constant(1)),
            &SymbolStream::Random { seed: 2, alphabet: 2 },
            30,
            0.3,
            NoiseModel::Uniform,
            2,
        )
        .unwrap();
        let p = zip_product_orbit(&h, &a, &b, g.len()).unwrap();
        for i in 0..30 {
            assert_eq!(p.errors()[i], a.errors()[i].max(b.errors()[i]));
        }
        let (a2, b2) = split_product_orbit(&p, &f, &g).unwrap();
        assert_eq!(a2, a);
        assert_eq!(b2, b);
    }

    #[test]
    fn truncation_keeps_prefix() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.2, 0.1),
            &SymbolStream::Constant(1),
            20,
            0.05,
            NoiseModel::Uniform,
            3,
        )
        .unwrap();
        let t = o.truncate(5).unwrap();
        assert_eq!(t.points(), &o.points()[..6]);
        assert_eq!(t.errors(), &o.errors()[..5]);
        assert!(o.truncate(21).is_err());
    }

    #[test]
    fn ledger_recomputation() {
        let s = Example::Sierpinski.make().unwrap();
        let o = noisy_average_orbit(
            &s,
            &Point::Pair(0.2, 0.1),
            &SymbolStream::Constant(2),
            100,
            0.05,
            NoiseModel::Uniform,
            3,
        )
        .unwrap();
        assert_eq!(o.ledger_discrepancy(&s).unwrap(), 0.0);
        let tampered = PseudoOrbit::from_parts(
            o.space().clone(),
            o.points().to_vec(),
            o.symbols().to_vec(),
            vec![0.0; o.horizon()],
        )
        .unwrap();
        assert!(tampered.ledger_discrepancy(&s).unwrap() > 0.0);
    }
}
