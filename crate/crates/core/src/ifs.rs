//! Parameterized iterated function systems and their combinators.
//!
//! Compositions follow one convention throughout the crate: a word
//! `λ₀ λ₁ … λₙ₋₁` acts as `f_{λₙ₋₁} ∘ … ∘ f_{λ₀}`, so `λ₀` is applied first.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spaces::{Point, Space};

/// A total self-map of a space.
pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// Index of a map within its system.
pub type Symbol = usize;

/// Tolerance of the sampled ratio check against an analytic β.
pub const RATIO_CHECK_TOL: f64 = 1e-9;

/// Tolerance of the conjugacy round-trip check.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

#[derive(Clone)]
pub struct Ifs {
    name: String,
    space: Space,
    labels: Vec<String>,
    maps: Vec<MapFn>,
    inverses: Vec<Option<MapFn>>,
    ratio: Option<f64>,
    surjective: bool,
}

impl fmt::Debug for Ifs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ifs")
            .field("name", &self.name)
            .field("space", &self.space.name())
            .field("labels", &self.labels)
            .field("ratio", &self.ratio)
            .finish()
    }
}

pub struct IfsBuilder {
    name: String,
    space: Space,
    labels: Vec<String>,
    maps: Vec<MapFn>,
    inverses: Vec<Option<MapFn>>,
    ratio: Option<f64>,
    surjective: bool,
}

impl IfsBuilder {
    pub fn map<F>(mut self, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        self.labels.push(label.into());
        self.maps.push(Arc::new(f));
        self.inverses.push(None);
        self
    }

    pub fn map_with_inverse<F, G>(mut self, label: impl Into<String>, f: F, inverse: G) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
        G: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        self.labels.push(label.into());
        self.maps.push(Arc::new(f));
        self.inverses.push(Some(Arc::new(inverse)));
        self
    }

    fn push_arc(&mut self, label: String, f: MapFn, inverse: Option<MapFn>) {
        self.labels.push(label);
        self.maps.push(f);
        self.inverses.push(inverse);
    }

    /// Analytic contraction ratio β.
    pub fn ratio(mut self, beta: f64) -> Self {
        self.ratio = Some(beta);
        self
    }

    /// Declares every map surjective (not verified).
    pub fn surjective(mut self, yes: bool) -> Self {
        self.surjective = yes;
        self
    }

    pub fn build(self) -> Result<Ifs> {
        if self.maps.is_empty() {
            return Err(Error::InvalidParameter(format!("system {} has no maps", self.name)));
        }
        if let Some(b) = self.ratio {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParameter(format!("contraction ratio {b} outside (0,1)")));
            }
        }
        Ok(Ifs {
            name: self.name,
            space: self.space,
            labels: self.labels,
            maps: self.maps,
            inverses: self.inverses,
            ratio: self.ratio,
            surjective: self.surjective,
        })
    }
}

/// A finite word over the index set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymbolWord(pub Vec<Symbol>);

impl SymbolWord {
    pub fn new(symbols: impl Into<Vec<Symbol>>) -> Self {
        Self(symbols.into())
    }

    pub fn concat(&self, other: &SymbolWord) -> SymbolWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SymbolWord(v)
    }
}

/// A deterministic, index-addressable symbol sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolStream {
    Constant(Symbol),
    Periodic(Vec<Symbol>),
    /// Uniform over `0..alphabet`; element `n` depends only on `(seed, n)`.
    Random {
        seed: u64,
        alphabet: usize,
    },
    Explicit(Vec<Symbol>),
}

impl SymbolStream {
    pub fn symbol(&self, n: usize) -> Result<Symbol> {
        match self {
            SymbolStream::Constant(s) => Ok(*s),
            SymbolStream::Periodic(w) => {
                if w.is_empty() {
                    Err(Error::InvalidParameter("empty periodic word".into()))
                } else {
                    Ok(w[n % w.len()])
                }
            }
            SymbolStream::Random { seed, alphabet } => {
                let mut rng = random_stream_rng(*seed, *alphabet)?;
                rng.set_word_pos(2 * n as u128);
                Ok((rng.next_u64() % *alphabet as u64) as Symbol)
            }
            SymbolStream::Explicit(v) => v.get(n).copied().ok_or(Error::StreamExhausted(n)),
        }
    }

    /// The first `n` symbols.
    pub fn take(&self, n: usize) -> Result<Vec<Symbol>> {
        match self {
            SymbolStream::Random { seed, alphabet } => {
                // sequential reads land on the same word positions as `symbol`
                let mut rng = random_stream_rng(*seed, *alphabet)?;
                Ok((0..n).map(|_| (rng.next_u64() % *alphabet as u64) as Symbol).collect())
            }
            _ => (0..n).map(|i| self.symbol(i)).collect(),
        }
    }

    /// Checks every symbol the stream can produce against an index set size.
    pub fn check_alphabet(&self, size: usize) -> Result<()> {
        let bad = |s: Symbol| {
            if s < size {
                Ok(())
            } else {
                Err(Error::UnknownSymbol { symbol: s, size })
            }
        };
        match self {
            SymbolStream::Constant(s) => bad(*s),
            SymbolStream::Periodic(w) | SymbolStream::Explicit(w) => w.iter().try_for_each(|&s| bad(s)),
            SymbolStream::Random { alphabet, .. } => {
                if *alphabet <= size && *alphabet > 0 {
                    Ok(())
                } else {
                    Err(Error::UnknownSymbol {
                        symbol: alphabet.saturating_sub(1),
                        size,
                    })
                }
            }
        }
    }
}

fn random_stream_rng(seed: u64, alphabet: usize) -> Result<ChaCha8Rng> {
    if alphabet == 0 {
        return Err(Error::InvalidParameter("random stream over an empty alphabet".into()));
    }
    Ok(ChaCha8Rng::seed_from_u64(seed))
}

/// Result of [`Ifs::contraction_ratio`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioEstimate {
    pub value: f64,
    /// `false` when `value` is a sampled lower bound rather than the analytic β.
    pub analytic: bool,
    pub samples: usize,
}

/// Sampled bi-Lipschitz constants of a conjugacy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distortion {
    pub lower: f64,
    pub upper: f64,
}

impl Ifs {
    pub fn builder(name: impl Into<String>, space: Space) -> IfsBuilder {
        IfsBuilder {
            name: name.into(),
            space,
            labels: vec![],
            maps: vec![],
            inverses: vec![],
            ratio: None,
            surjective: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn ratio(&self) -> Option<f64> {
        self.ratio
    }

    pub fn is_surjective(&self) -> bool {
        self.surjective
    }

    pub fn has_inverse(&self, symbol: Symbol) -> bool {
        matches!(self.inverses.get(symbol), Some(Some(_)))
    }

    /// Same maps restricted to the given symbols, relabeled `0..`.
    pub fn restrict(&self, symbols: &[Symbol], name: impl Into<String>) -> Result<Ifs> {
        let mut b = Ifs::builder(name, self.space.clone()).surjective(self.surjective);
        for &s in symbols {
            self.check_symbol(s)?;
            b.push_arc(self.labels[s].clone(), self.maps[s].clone(), self.inverses[s].clone());
        }
        if let Some(beta) = self.ratio {
            b = b.ratio(beta);
        }
        b.build()
    }

    /// Replaces the analytic contraction ratio.
    pub fn with_ratio(mut self, beta: Option<f64>) -> Result<Ifs> {
        if let Some(b) = beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::InvalidParameter(format!("contraction ratio {b} outside (0,1)")));
            }
        }
        self.ratio = beta;
        Ok(self)
    }

    pub fn check_symbol(&self, symbol: Symbol) -> Result<()> {
        if symbol < self.maps.len() {
            Ok(())
        } else {
            Err(Error::UnknownSymbol {
                symbol,
                size: self.maps.len(),
            })
        }
    }

    /// `f_λ(p)`.
    pub fn apply(&self, symbol: Symbol, p: &Point) -> Result<Point> {
        self.check_symbol(symbol)?;
        self.space.check(p)?;
        Ok((self.maps[symbol])(p))
    }

    /// `f_λ(p)` without symbol or membership checks.
    pub(crate) fn image(&self, symbol: Symbol, p: &Point) -> Point {
        (self.maps[symbol])(p)
    }

    /// `f_λ⁻¹(p)` through the registered inverse, if any, and only when the
    /// candidate lies in the space and maps back onto `p`.
    pub fn preimage(&self, symbol: Symbol, p: &Point) -> Result<Point> {
        self.check_symbol(symbol)?;
        let unavailable = || Error::PreimageUnavailable {
            symbol,
            point: p.to_string(),
        };
        let inv = self.inverses[symbol].as_ref().ok_or_else(unavailable)?;
        let q = inv(p);
        if self.space.contains(&q)
            && self
                .space
                .distance(&self.image(symbol, &q), p)
                .is_ok_and(|d| d <= ROUND_TRIP_TOL)
        {
            Ok(q)
        } else {
            Err(unavailable())
        }
    }

    /// `F_w(p) = f_{λₙ₋₁} ∘ … ∘ f_{λ₀}(p)`; the empty word is the identity.
    pub fn compose_apply(&self, word: &SymbolWord, p: &Point) -> Result<Point> {
        self.space.check(p)?;
        for &s in &word.0 {
            self.check_symbol(s)?;
        }
        Ok(word.0.iter().fold(p.clone(), |x, &s| self.image(s, &x)))
    }

    /// Sampled check that every map sends the space into itself.
    pub fn verify_range(&self, samples: usize, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let p = self.space.sample(&mut rng);
            for s in 0..self.len() {
                let q = self.image(s, &p);
                if !self.space.contains(&q) {
                    return Err(Error::SpaceMismatch {
                        space: self.space.name(),
                        point: format!("{} = {}({p})", q, self.labels[s]),
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest sampled ratio `d(f_λ(x), f_λ(y)) / d(x, y)` over all maps.
    pub fn sampled_ratio(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: Option<f64> = None;
        for _ in 0..samples {
            let p = self.space.sample(&mut rng);
            let q = self.space.sample(&mut rng);
            let d = self.space.dist(&p, &q);
            if d == 0.0 {
                continue;
            }
            for s in 0..self.len() {
                let r = self.space.dist(&self.image(s, &p), &self.image(s, &q)) / d;
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
        best.ok_or_else(|| Error::NoDistinctSamples(self.space.name()))
    }

    /// The analytic β when registered, otherwise a sampled lower bound.
    pub fn contraction_ratio(&self, samples: usize, seed: u64) -> Result<RatioEstimate> {
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        if let Some(b) = self.ratio {
            return Ok(RatioEstimate {
                value: b,
                analytic: true,
                samples: 0,
            });
        }
        Ok(RatioEstimate {
            value: self.sampled_ratio(samples, seed)?,
            analytic: false,
            samples,
        })
    }

    /// Sampled check of the analytic β on random pairs.
    pub fn verify_ratio(&self, samples: usize, seed: u64) -> Result<()> {
        let Some(beta) = self.ratio else {
            return Err(Error::MissingRatio(self.name.clone()));
        };
        let observed = self.sampled_ratio(samples, seed)?;
        if observed <= beta + RATIO_CHECK_TOL {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "{}: sampled ratio {observed} exceeds analytic {beta}",
                self.name
            )))
        }
    }
}

/// `F × G` on the max-metric product; symbol `(λ, γ)` has index `λ·|Γ| + γ`.
pub fn product_ifs(f: &Ifs, g: &Ifs) -> Ifs {
    let space = Space::product(f.space.clone(), g.space.clone());
    let mut b = Ifs::builder(format!("{}×{}", f.name, g.name), space).surjective(f.surjective && g.surjective);
    for i in 0..f.len() {
        for j in 0..g.len() {
            let (fi, gj) = (f.maps[i].clone(), g.maps[j].clone());
            let map: MapFn = Arc::new(move |p: &Point| {
                let (a, c) = p.components().expect("product point");
                Point::pair(fi(a), gj(c))
            });
            let inverse = match (&f.inverses[i], &g.inverses[j]) {
                (Some(fi), Some(gj)) => {
                    let (fi, gj) = (fi.clone(), gj.clone());
                    Some(Arc::new(move |p: &Point| {
                        let (a, c) = p.components().expect("product point");
                        Point::pair(fi(a), gj(c))
                    }) as MapFn)
                }
                _ => None,
            };
            b.push_arc(format!("({},{})", f.labels[i], g.labels[j]), map, inverse);
        }
    }
    if let (Some(x), Some(y)) = (f.ratio, g.ratio) {
        b = b.ratio(x.max(y));
    }
    b.build().expect("nonempty product")
}

/// The k-word of a power-system symbol, in application order.
///
/// Symbol indices read `λ₀` as the most significant digit, so for Σ₂ with
/// `k = 2` the symbol 1 is `f₁ ∘ f₀`.
pub fn power_word(base: usize, k: usize, symbol: Symbol) -> Vec<Symbol> {
    let mut word = vec![0; k];
    let mut rest = symbol;
    for slot in word.iter_mut().rev() {
        *slot = rest % base;
        rest /= base;
    }
    word
}

/// Flattens a word of `F^k` into the corresponding word of `F`.
pub fn flatten_power_word(base: usize, k: usize, word: &SymbolWord) -> SymbolWord {
    SymbolWord(word.0.iter().flat_map(|&s| power_word(base, k, s)).collect())
}

/// `F^k`: all k-fold compositions `f_{λₖ₋₁} ∘ … ∘ f_{λ₀}`.
pub fn power_ifs(f: &Ifs, k: usize) -> Result<Ifs> {
    if k == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    let count = f
        .len()
        .checked_pow(k as u32)
        .filter(|&c| c <= 1 << 20)
        .ok_or_else(|| Error::InvalidParameter(format!("{}^{k} maps is too many", f.len())))?;
    let mut b = Ifs::builder(format!("{}^{k}", f.name), f.space.clone()).surjective(f.surjective);
    for mu in 0..count {
        let word = power_word(f.len(), k, mu);
        let maps: Vec<MapFn> = word.iter().map(|&s| f.maps[s].clone()).collect();
        let map: MapFn = Arc::new(move |p: &Point| maps.iter().fold(p.clone(), |x, m| m(&x)));
        let inverse = word
            .iter()
            .map(|&s| f.inverses[s].clone())
            .collect::<Option<Vec<_>>>()
            .map(|invs| Arc::new(move |p: &Point| invs.iter().rev().fold(p.clone(), |x, m| m(&x))) as MapFn);
        let label = word.iter().map(|&s| f.labels[s].as_str()).collect::<Vec<_>>().join("·");
        b.push_arc(label, map, inverse);
    }
    if let Some(beta) = f.ratio {
        b = b.ratio(beta.powi(k as i32));
    }
    b.build()
}

/// `g_λ = h ∘ f_λ ∘ h⁻¹` on `target`, with sampled distortion bounds
/// `L ≤ d'(h(p), h(q)) / d(p, q) ≤ K`.
pub fn conjugate_ifs<H, Hinv>(
    f: &Ifs,
    target: Space,
    h: H,
    h_inv: Hinv,
    samples: usize,
    seed: u64,
) -> Result<(Ifs, Distortion)>
where
    H: Fn(&Point) -> Point + Send + Sync + 'static,
    Hinv: Fn(&Point) -> Point + Send + Sync + 'static,
{
    let h: MapFn = Arc::new(h);
    let h_inv: MapFn = Arc::new(h_inv);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let p = f.space.sample(&mut rng);
        let back = h_inv(&h(&p));
        let err = f.space.distance(&back, &p).unwrap_or(f64::INFINITY);
        if err > ROUND_TRIP_TOL {
            return Err(Error::RoundTrip {
                point: p.to_string(),
                distance: err,
            });
        }
        let q = target.sample(&mut rng);
        let fwd = h(&h_inv(&q));
        let err = target.distance(&fwd, &q).unwrap_or(f64::INFINITY);
        if err > ROUND_TRIP_TOL {
            return Err(Error::RoundTrip {
                point: q.to_string(),
                distance: err,
            });
        }
        let p2 = f.space.sample(&mut rng);
        let d = f.space.dist(&p, &p2);
        if d > 0.0 {
            let r = target.distance(&h(&p), &h(&p2))? / d;
            lower = lower.min(r);
            upper = upper.max(r);
        }
    }
    if !lower.is_finite() {
        return Err(Error::NoDistinctSamples(f.space.name()));
    }
    let mut b = Ifs::builder(format!("h∘{}∘h⁻¹", f.name), target).surjective(f.surjective);
    for s in 0..f.len() {
        let (fm, hh, hi) = (f.maps[s].clone(), h.clone(), h_inv.clone());
        let map: MapFn = Arc::new(move |p: &Point| hh(&fm(&hi(p))));
        let inverse = f.inverses[s].clone().map(|finv| {
            let (hh, hi) = (h.clone(), h_inv.clone());
            Arc::new(move |p: &Point| hh(&finv(&hi(p)))) as MapFn
        });
        b.push_arc(f.labels[s].clone(), map, inverse);
    }
    Ok((b.build()?, Distortion { lower, upper }))
}

/// A seeded random word of length `n` over `0..alphabet`.
pub fn random_word<R: Rng + ?Sized>(rng: &mut R, alphabet: usize, n: usize) -> SymbolWord {
    SymbolWord((0..n).map(|_| rng.gen_range(0..alphabet)).collect())
}
