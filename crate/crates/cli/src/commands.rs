use std::fs::File;
use std::io::{BufReader, Write};

use rayon::prelude::*;

use ifs_shadow::acceptance::{self, sub_seed, DEFAULT_SEED};
use ifs_shadow::catalog::{catalog, Example};
use ifs_shadow::chain::{analyze, build_chain_graph, find_chain, ChainSearch, DEFAULT_SAMPLES};
use ifs_shadow::io::{read_orbit, write_comments, write_orbit, write_shadow_report};
use ifs_shadow::orbit::{
    block_switching_orbit, noisy_average_orbit, validate, NoiseModel, PseudoOrbit, ValidationMode, Verdict, LEDGER_TOL,
};
use ifs_shadow::shadow::{
    average_distance_profile, brute_force_search, constructive_delta, constructive_shadow, tail_only, SearchStrategy,
    DEFAULT_WINDOW,
};
use ifs_shadow::spaces::{BinarySeq, BoxCover};
use ifs_shadow::{Ifs, Point, Space, SymbolStream};

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{shade, write_atomic, write_pgm};

type Outcome = Result<(), CliError>;

/// Reads a setting, falling back to `default`, and records the value used.
macro_rules! get {
    ($r:expr, $field:ident, $default:expr) => {{
        let v = $r.params.$field.clone().unwrap_or_else(|| $default.into());
        $r.record(stringify!($field), v)
    }};
}

// Seed families.
const STREAM: u64 = 1;
const NOISE: u64 = 2;
const CHAOS: u64 = 3;
const SAMPLED: u64 = 30;

fn system(r: &mut Resolved, default: &str) -> Result<(Example, Ifs), CliError> {
    let name = r.params.example.clone().unwrap_or_else(|| default.to_string());
    let e = Example::parse(&name, r.params.param)?;
    r.record("example", e);
    Ok((e, e.make()?))
}

fn parse_point(space: &Space, text: &str) -> Result<Point, CliError> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    Ok(space.parse_coordinates(&fields)?)
}

fn coords(space: &Space, p: &Point) -> Result<String, CliError> {
    Ok(space.coordinates(p)?.join(" "))
}

fn start_point(r: &mut Resolved, space: &Space) -> Result<Point, CliError> {
    let p = match r.params.start.clone() {
        Some(s) => parse_point(space, &s)?,
        None => BoxCover::new(space, 1)?.center(0),
    };
    space.check(&p)?;
    let text = coords(space, &p)?;
    r.record("start", text);
    Ok(p)
}

fn default_horizon(space: &Space) -> usize {
    match space {
        Space::Sigma2 => 200,
        _ => 2000,
    }
}

fn default_grid(space: &Space) -> usize {
    match space {
        Space::Interval { .. } | Space::Circle => 64,
        Space::Plane(_) => 32,
        Space::Sigma2 => 6,
        Space::Finite(n) => *n,
        Space::Product(..) => 8,
    }
}

fn parse_mode(name: &str) -> Result<ValidationMode, CliError> {
    match name {
        "plain" => Ok(ValidationMode::Plain),
        "average" => Ok(ValidationMode::Average),
        "average_shifted" => Ok(ValidationMode::AverageShifted),
        other => Err(CliError::Usage(format!("unknown mode {other:?}"))),
    }
}

/// A seeded δ-average pseudo-orbit with random symbols.
fn generate(r: &mut Resolved, ifs: &Ifs, delta: f64, noise: &str) -> Result<PseudoOrbit, CliError> {
    let horizon = get!(r, horizon, default_horizon(ifs.space()));
    let seed = get!(r, seed, DEFAULT_SEED);
    let start = start_point(r, ifs.space())?;
    let noise: String = get!(r, noise, noise);
    let model = match noise.as_str() {
        "uniform" => NoiseModel::Uniform,
        "bursty" => NoiseModel::Bursty {
            jump: get!(r, jump, 6.0 * delta),
            period: get!(r, period, 8usize),
        },
        other => return Err(CliError::Usage(format!("unknown noise model {other:?}"))),
    };
    let stream = SymbolStream::Random {
        seed: sub_seed(seed, STREAM, 0),
        alphabet: ifs.len(),
    };
    Ok(noisy_average_orbit(
        ifs,
        &start,
        &stream,
        horizon,
        delta,
        model,
        sub_seed(seed, NOISE, 0),
    )?)
}

fn save_orbit(r: &Resolved, name: &str, orbit: &PseudoOrbit) -> Result<std::path::PathBuf, CliError> {
    write_atomic(&r.out_dir(), name, |w| Ok(write_orbit(w, orbit, r.used())?))
}

pub fn orbit(r: &mut Resolved) -> Outcome {
    let (_, ifs) = system(r, "sierpinski")?;
    let delta = get!(r, delta, 0.05);
    let mode: String = get!(r, mode, "average");
    let mode = parse_mode(&mode)?;

    let orbit = if let Some(path) = r.params.input.clone() {
        r.record("input", path.display());
        let file = File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let (orbit, _) = read_orbit(BufReader::new(file), ifs.space())?;
        let drift = orbit.ledger_discrepancy(&ifs)?;
        if drift > LEDGER_TOL {
            return Err(CliError::Analysis(format!("stored alpha column is off by {drift:e}")));
        }
        orbit
    } else {
        let orbit = generate(r, &ifs, delta, "bursty")?;
        let path = save_orbit(r, "orbit.csv", &orbit)?;
        let file = File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let (back, _) = read_orbit(BufReader::new(file), ifs.space())?;
        if back != orbit {
            return Err(CliError::Analysis(
                "orbit.csv does not read back to the same orbit".into(),
            ));
        }
        orbit
    };

    let verdict = validate(&orbit, delta, mode)?;
    let errors = orbit.errors();
    write_atomic(&r.out_dir(), "validation.csv", |w| {
        write_comments(w, r.used())?;
        let mut t = csv::Writer::from_writer(w);
        match &verdict {
            Verdict::Average(v) => {
                t.write_record(["n", "alpha", "average"])
                    .map_err(ifs_shadow::Error::from)?;
                for (i, (a, s)) in errors.iter().zip(&v.profile).enumerate() {
                    t.write_record([(i + 1).to_string(), a.to_string(), s.to_string()])
                        .map_err(ifs_shadow::Error::from)?;
                }
            }
            Verdict::Plain { .. } => {
                t.write_record(["n", "alpha"]).map_err(ifs_shadow::Error::from)?;
                for (i, a) in errors.iter().enumerate() {
                    t.write_record([(i + 1).to_string(), a.to_string()])
                        .map_err(ifs_shadow::Error::from)?;
                }
            }
        }
        t.flush()?;
        Ok(())
    })?;

    let max = errors.iter().copied().fold(0.0, f64::max);
    let mean = errors.iter().sum::<f64>() / errors.len().max(1) as f64;
    println!("system        {}", ifs.name());
    println!("steps         {}", orbit.horizon());
    println!("delta         {delta}");
    println!("max alpha     {max}");
    println!("mean alpha    {mean}");
    match &verdict {
        Verdict::Average(v) => match v.first_index {
            Some(n) => println!("valid         yes, N = {n}"),
            None => println!("valid         no"),
        },
        Verdict::Plain { passed, .. } => println!("valid         {}", if *passed { "yes" } else { "no" }),
    }
    if !verdict.passed() {
        return Err(CliError::Analysis(format!(
            "not a {delta}-pseudo-orbit in the chosen mode"
        )));
    }
    Ok(())
}

pub fn shadow(r: &mut Resolved) -> Outcome {
    let (_, ifs) = system(r, "sierpinski")?;
    let space = ifs.space().clone();
    let eps = get!(r, eps, 0.1);
    let beta = ifs
        .ratio()
        .ok_or_else(|| CliError::Analysis(format!("{} has no contraction ratio below one", ifs.name())))?;
    let delta = get!(r, delta, constructive_delta(beta, eps));
    let window = get!(r, window, DEFAULT_WINDOW);
    let orbit = generate(r, &ifs, delta, "uniform")?;
    let n0 = validate(&orbit, delta, ValidationMode::Average)?.first_index();
    let report = constructive_shadow(&ifs, &orbit, eps)?;
    let tail = report.tail_over(window)?;

    let word_len = get!(r, word_len, 6usize);
    let oracle: String = get!(r, oracle, "exhaustive");
    let strategy = match oracle.as_str() {
        "exhaustive" => SearchStrategy::Exhaustive(word_len),
        "greedy" => SearchStrategy::Greedy,
        other => return Err(CliError::Usage(format!("unknown oracle {other:?}"))),
    };
    let grid = get!(r, grid, default_grid(&space));
    let cover = BoxCover::new(&space, grid)?;
    let mut candidates = vec![orbit.points()[0].clone()];
    candidates.extend((0..cover.len()).map(|i| cover.center(i)).filter(|p| space.contains(p)));
    let best = brute_force_search(&ifs, &orbit, &candidates, strategy, word_len)?;
    let own = SymbolStream::Explicit(orbit.symbols().to_vec());
    let constructive_mean =
        average_distance_profile(&ifs, &orbit.points()[0], &own, &orbit.truncate(word_len)?, window)?.mean();

    save_orbit(r, "orbit.csv", &orbit)?;
    let out = r.out_dir();
    write_atomic(&out, "shadow.csv", |w| {
        Ok(write_shadow_report(w, &report, &space, r.used())?)
    })?;
    write_atomic(&out, "oracle.csv", |w| {
        Ok(write_shadow_report(w, &best, &space, r.used())?)
    })?;

    println!("system             {}", ifs.name());
    println!("beta               {beta}");
    println!("eps                {eps}");
    println!("delta              {delta}");
    println!("steps              {}", orbit.horizon());
    println!(
        "N                  {}",
        n0.map(|n| n.to_string()).unwrap_or_else(|| "none".into())
    );
    println!("tail               {tail}");
    println!("max distance       {}", report.max_distance());
    println!("oracle candidates  {}", candidates.len());
    println!("oracle mean        {} over {word_len} steps", best.mean());
    println!("constructive mean  {constructive_mean} over {word_len} steps");

    if !(tail < eps) {
        return Err(CliError::Analysis(format!("tail {tail} is not below eps {eps}")));
    }
    if best.mean() > constructive_mean + 1e-12 {
        return Err(CliError::Analysis(
            "oracle is worse than the constructive shadow".into(),
        ));
    }
    Ok(())
}

pub fn counterexample(r: &mut Resolved) -> Outcome {
    let (e, ifs) = system(r, "circle_counterexample")?;
    let a = match e {
        Example::CircleCounterexample(a) => a,
        other => {
            return Err(CliError::Usage(format!(
                "counterexample needs circle_counterexample, got {other}"
            )))
        }
    };
    let space = ifs.space().clone();
    let (b, c) = (Point::Real(0.0), Point::Real(a));
    let gap = space.dist(&b, &c);
    let eps = get!(r, eps, 0.15);
    let seed = get!(r, seed, DEFAULT_SEED);
    let k = get!(r, k, 16usize);
    let doublings = get!(r, doublings, 10usize);
    let horizon = r.record("horizon", 3 * (1usize << doublings.min(40)) * k);
    let delta = get!(r, delta, 3.0 * gap / k as f64 + 1e-9);
    let grid = get!(r, grid, 512usize);
    let streams = get!(r, streams, 64usize);
    let claim_steps = get!(r, claim_steps, 10_000usize);
    let claim_tol = r.record("claim_tol", 1e-3);
    let profile_z = get!(r, profile_z, 128usize);
    let profile_streams = get!(r, profile_streams, 16usize);
    let stride = get!(r, stride, 48usize).max(1);
    if grid == 0 || profile_z == 0 {
        return Err(CliError::Usage("grids must be positive".into()));
    }

    let block = block_switching_orbit(&ifs, &b, &c, k, horizon, 0)?;
    let verdict = validate(&block, delta, ValidationMode::Average)?;

    let words: Vec<Vec<usize>> = (0..streams as u64)
        .map(|j| {
            SymbolStream::Random {
                seed: sub_seed(seed, SAMPLED, j),
                alphabet: 2,
            }
            .take(claim_steps)
        })
        .collect::<Result<_, _>>()?;
    let reached: Vec<Option<usize>> = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let z = Point::Real(i as f64 / grid as f64);
            let (ifs, space, b, c) = (&ifs, &space, &b, &c);
            words.iter().map(move |w| {
                let mut y = z.clone();
                for n in 0..=w.len() {
                    if n > 0 {
                        y = ifs.apply(w[n - 1], &y).ok()?;
                    }
                    if space.dist(&y, b) <= claim_tol || space.dist(&y, c) <= claim_tol {
                        return Some(n);
                    }
                }
                None
            })
        })
        .collect();

    let tails: Vec<f64> = (0..profile_z)
        .into_par_iter()
        .flat_map_iter(|i| {
            let z = Point::Real(i as f64 / profile_z as f64);
            let (ifs, block) = (&ifs, &block);
            (0..profile_streams as u64).map(move |j| {
                let sigma = SymbolStream::Random {
                    seed: sub_seed(seed, SAMPLED, j),
                    alphabet: 2,
                };
                tail_only(ifs, &z, &sigma, block, DEFAULT_WINDOW).unwrap_or(f64::NAN)
            })
        })
        .collect();

    let picks: Vec<usize> = (0..4).map(|q| q * profile_z / 4).collect();
    let profiles: Vec<Vec<f64>> = picks
        .iter()
        .map(|&i| {
            let z = Point::Real(i as f64 / profile_z as f64);
            let sigma = SymbolStream::Random {
                seed: sub_seed(seed, SAMPLED, 0),
                alphabet: 2,
            };
            Ok(average_distance_profile(&ifs, &z, &sigma, &block, DEFAULT_WINDOW)?.profile)
        })
        .collect::<Result<_, CliError>>()?;

    let out = r.out_dir();
    let csv_err = |e: csv::Error| CliError::from(ifs_shadow::Error::from(e));
    save_orbit(r, "block_orbit.csv", &block)?;
    write_atomic(&out, "claim.csv", |w| {
        write_comments(w, r.used())?;
        let mut t = csv::Writer::from_writer(w);
        t.write_record(["z", "stream", "step"]).map_err(csv_err)?;
        for (idx, hit) in reached.iter().enumerate() {
            let (i, j) = (idx / streams, idx % streams);
            let step = hit.map(|n| n.to_string()).unwrap_or_default();
            t.write_record([(i as f64 / grid as f64).to_string(), j.to_string(), step])
                .map_err(csv_err)?;
        }
        t.flush()?;
        Ok(())
    })?;
    write_atomic(&out, "tails.csv", |w| {
        write_comments(w, r.used())?;
        let mut t = csv::Writer::from_writer(w);
        t.write_record(["z", "stream", "tail"]).map_err(csv_err)?;
        for (idx, tail) in tails.iter().enumerate() {
            let (i, j) = (idx / profile_streams, idx % profile_streams);
            t.write_record([
                (i as f64 / profile_z as f64).to_string(),
                j.to_string(),
                tail.to_string(),
            ])
            .map_err(csv_err)?;
        }
        t.flush()?;
        Ok(())
    })?;
    write_atomic(&out, "profiles.csv", |w| {
        write_comments(w, r.used())?;
        let mut t = csv::Writer::from_writer(w);
        let mut header = vec!["n".to_string()];
        header.extend(picks.iter().map(|&i| format!("z={}", i as f64 / profile_z as f64)));
        t.write_record(&header).map_err(csv_err)?;
        let len = profiles.first().map_or(0, Vec::len);
        for n in (0..len).step_by(stride).chain(std::iter::once(len.saturating_sub(1))) {
            let mut row = vec![(n + 1).to_string()];
            row.extend(profiles.iter().map(|p| p[n].to_string()));
            t.write_record(&row).map_err(csv_err)?;
            if n + 1 == len {
                break;
            }
        }
        t.flush()?;
        Ok(())
    })?;

    let hit = reached.iter().filter(|h| h.is_some()).count();
    let slowest = reached.iter().flatten().max().copied().unwrap_or(0);
    let low = tails.iter().filter(|&&t| !(t >= eps)).count();
    let smallest = tails.iter().copied().fold(f64::INFINITY, f64::min);
    println!("system          {}", ifs.name());
    println!("d(b, c)         {gap}");
    println!(
        "block orbit     K = {k}, {horizon} steps, delta = {delta}, N = {:?}",
        verdict.first_index()
    );
    println!(
        "claim           {hit}/{} orbits reach b or c, slowest at step {slowest}",
        reached.len()
    );
    println!(
        "tails           {}/{} at least {eps}, smallest {smallest}",
        tails.len() - low,
        tails.len()
    );

    let mut failures = Vec::new();
    if !verdict.passed() {
        failures.push(format!("block orbit is not a {delta}-average pseudo-orbit"));
    }
    if hit != reached.len() {
        failures.push(format!(
            "{} orbits never came within {claim_tol} of b or c",
            reached.len() - hit
        ));
    }
    if low > 0 {
        failures.push(format!("{low} tails below {eps}"));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Analysis(failures.join("; ")))
    }
}

pub fn chainrec(r: &mut Resolved) -> Outcome {
    let (_, mut ifs) = system(r, "circle_halfpoint")?;
    if let Some(m) = r.params.map {
        r.record("map", m);
        let name = format!("{}[f{m}]", ifs.name());
        ifs = ifs.restrict(&[m], name)?;
    }
    let space = ifs.space().clone();
    let resolution = get!(r, resolution, 256usize);
    let eps = get!(r, eps, 0.02);
    let samples = get!(r, samples, DEFAULT_SAMPLES);
    let seed = get!(r, seed, DEFAULT_SEED);
    let at = r.params.at.clone().map(|s| parse_point(&space, &s)).transpose()?;
    let from = r.params.from.clone().map(|s| parse_point(&space, &s)).transpose()?;
    let to = r.params.to.clone().map(|s| parse_point(&space, &s)).transpose()?;
    if from.is_some() != to.is_some() {
        return Err(CliError::Usage("--from and --to go together".into()));
    }
    for (key, p) in [("at", &at), ("from", &from), ("to", &to)] {
        if let Some(p) = p {
            let text = coords(&space, p)?;
            r.record(key, text);
        }
    }

    let graph = build_chain_graph(&ifs, resolution, eps, samples, seed)?;
    let report = analyze(&graph);
    let out = r.out_dir();
    write_atomic(&out, "edges.txt", |w| {
        write_comments(w, r.used())?;
        Ok(graph.write_edge_list(&mut *w)?)
    })?;
    write_atomic(&out, "recurrence.csv", |w| {
        write_comments(w, r.used())?;
        Ok(report.write_csv(&mut *w)?)
    })?;

    println!("system        {}", ifs.name());
    println!("boxes         {} ({} active)", graph.len(), graph.active_count());
    println!("edges         {}", graph.edge_count());
    println!("effective eps {}", graph.effective_eps());
    println!(
        "recurrent     {} ({:.4} of active) in {} component(s)",
        report.recurrent_count(),
        report.recurrent_fraction(),
        report.component_count
    );
    if let Some(p) = &at {
        let i = graph.cover().locate(p)?;
        let comp = report.component[i].map(|c| c.to_string()).unwrap_or_else(|| "-".into());
        println!("box {i}       recurrent: {}, component {comp}", report.recurrent[i]);
    }
    if let (Some(x), Some(y)) = (&from, &to) {
        match find_chain(&ifs, x, y, eps, resolution)? {
            ChainSearch::Found(chain) => {
                save_orbit(r, "chain.csv", &chain)?;
                println!("chain         {} steps", chain.horizon());
            }
            ChainSearch::Absent { resolution } => {
                println!("chain         none through box centers at resolution {resolution}");
            }
        }
    }
    Ok(())
}

const SIGMA2_KEEP: usize = 64;

/// Position of a point in the unit square (plane) or on the unit segment.
fn project(space: &Space, p: &Point) -> Result<(f64, f64), CliError> {
    match (space, p) {
        (Space::Interval { lo, hi }, Point::Real(x)) => Ok(((x - lo) / (hi - lo), 0.0)),
        (Space::Circle, Point::Real(x)) => Ok((*x, 0.0)),
        (Space::Plane(_), Point::Pair(x, y)) => Ok((*x, *y)),
        (Space::Sigma2, Point::Seq(s)) => {
            Ok((s.take(52).iter().rev().fold(0.0, |acc, &b| (acc + b as f64) / 2.0), 0.0))
        }
        _ => Err(CliError::Usage(format!(
            "attractor images are not supported on {}",
            space.name()
        ))),
    }
}

pub fn attractor(r: &mut Resolved) -> Outcome {
    let (_, ifs) = system(r, "sierpinski")?;
    let space = ifs.space().clone();
    let n = get!(r, points, 100_000usize);
    let seed = get!(r, seed, DEFAULT_SEED);
    let size = get!(r, image_size, 512usize);
    if size == 0 {
        return Err(CliError::Usage("image size must be positive".into()));
    }
    let start = start_point(r, &space)?;
    project(&space, &start)?;
    let burn = 100;
    let symbols = SymbolStream::Random {
        seed: sub_seed(seed, CHAOS, 0),
        alphabet: ifs.len(),
    }
    .take(n + burn)?;
    let mut x = start;
    let mut pts = Vec::with_capacity(n);
    for (i, &s) in symbols.iter().enumerate() {
        x = ifs.apply(s, &x)?;
        if let Point::Seq(q) = &x {
            if q.prefix_len() > SIGMA2_KEEP {
                x = Point::Seq(BinarySeq::new(&q.take(SIGMA2_KEEP), q.period())?);
            }
        }
        if i >= burn {
            pts.push(x.clone());
        }
    }

    let xy: Vec<(f64, f64)> = pts.iter().map(|p| project(&space, p)).collect::<Result<_, _>>()?;
    let planar = matches!(space, Space::Plane(_));
    let (lo, hi) = xy
        .iter()
        .fold(([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]), |(lo, hi), &(a, b)| {
            ([lo[0].min(a), lo[1].min(b)], [hi[0].max(a), hi[1].max(b)])
        });
    let (width, height, rows) = if planar {
        let span = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
        let h = ((size as f64 * span[1] / span[0]).round() as usize).max(1);
        (size, h, Some(span))
    } else {
        (size, (size / 8).max(1), None)
    };
    let mut counts = vec![0u32; width * height];
    for &(a, b) in &xy {
        match rows {
            Some(span) => {
                let col = (((a - lo[0]) / span[0] * width as f64) as usize).min(width - 1);
                let row = (((hi[1] - b) / span[1] * height as f64) as usize).min(height - 1);
                counts[row * width + col] += 1;
            }
            None => {
                let col = ((a * width as f64) as usize).min(width - 1);
                for row in 0..height {
                    counts[row * width + col] += 1;
                }
            }
        }
    }

    let out = r.out_dir();
    write_atomic(&out, "points.csv", |w| {
        write_comments(w, r.used())?;
        let mut header: Vec<String> = (0..space.coordinate_count()).map(|i| format!("x{i}")).collect();
        header.insert(0, "index".into());
        writeln!(w, "{}", header.join(","))?;
        for (i, p) in pts.iter().enumerate() {
            writeln!(w, "{i},{}", space.coordinates(p)?.join(","))?;
        }
        Ok(())
    })?;
    write_atomic(&out, "attractor.pgm", |w| {
        write_pgm(w, width, height, &shade(&counts), r.used())
    })?;
    println!("system   {}", ifs.name());
    println!("points   {}", pts.len());
    println!("image    {width}x{height}");
    Ok(())
}

pub fn list_examples() -> Outcome {
    println!(
        "{:<22} {:<12} {:<6} {:<9} note",
        "name", "parameters", "ratio", "avg-shad"
    );
    for e in catalog() {
        let info = e.info();
        let ratio = info.ratio.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
        let shad = if info.has_average_shadowing { "yes" } else { "no" };
        let params = if info.parameters.is_empty() {
            "-".to_string()
        } else {
            info.parameters
        };
        println!(
            "{:<22} {:<12} {:<6} {:<9} {}",
            info.name, params, ratio, shad, info.note
        );
    }
    Ok(())
}

pub fn verify(r: &mut Resolved) -> Outcome {
    let seed = get!(r, seed, DEFAULT_SEED);
    let results = acceptance::run_all(seed);
    for res in &results {
        println!("{}", res.line());
    }
    let text = acceptance::report_text(seed, &results);
    write_atomic(&r.out_dir(), "verify_report.txt", |w| {
        write_comments(w, r.used())?;
        w.write_all(text.as_bytes())?;
        Ok(())
    })?;
    let failed = results.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Analysis(format!(
            "{failed} of {} criteria failed",
            results.len()
        )));
    }
    Ok(())
}
