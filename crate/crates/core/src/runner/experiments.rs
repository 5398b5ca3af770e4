use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::index::sample;
use serde_json::{json, Value};

use super::config::{ConjectureSpec, Experiment, LipschitzSpec, LneFieldSpec, ScanMedialSpec, VerifyTheoremSpec};
use super::svg::{Plot, MAX_BACKGROUND};
use super::Check;
use crate::error::{Error, Result};
use crate::geom;
use crate::medial::{scan_medial, GridSpec, MedialMethod, ScanParams};
use crate::nearfield::ClosestPointMap;
use crate::probes::{
    conjecture_at, conjecture_probe, lipschitz_quotient, lne_report, rng, verify_theorem, ConjectureOptions, Lab,
    ProbeRegion, TheoremOptions,
};

/// Plot content in ambient coordinates, before slicing.
#[derive(Debug, Default)]
pub(crate) struct PlotData {
    title: String,
    window: (Vec<f64>, Vec<f64>),
    colored: Vec<(Vec<f64>, f64)>,
    color_label: String,
    paths: Vec<(String, Vec<Vec<f64>>)>,
    markers: Vec<(String, Vec<f64>)>,
    /// Balls, drawn as their section by the plot plane.
    balls: Vec<(String, Vec<f64>, f64)>,
}

pub(crate) struct Done {
    pub result: Value,
    pub checks: Vec<Check>,
    pub plot: PlotData,
    pub warnings: Vec<String>,
}

pub(crate) fn execute(lab: &Lab, exp: &Experiment, seed: u64, csv: &Path) -> Result<Done> {
    match exp {
        Experiment::ScanMedial(s) => scan(lab, s, csv),
        Experiment::LneField(s) => lne_field(lab, s, seed, csv),
        Experiment::Lipschitz(s) => lipschitz(lab, s, seed, csv),
        Experiment::VerifyTheorem(s) => theorem(lab, s, seed, csv),
        Experiment::Conjecture(s) => conjecture(lab, s, csv),
    }
}

fn box_around(c: &[f64], r: f64) -> (Vec<f64>, Vec<f64>) {
    (c.iter().map(|x| x - r).collect(), c.iter().map(|x| x + r).collect())
}

fn coords(prefix: &str, dim: usize) -> impl Iterator<Item = String> + '_ {
    (0..dim).map(move |i| format!("{prefix}{i}"))
}

fn nums(v: &[f64]) -> impl Iterator<Item = String> + '_ {
    v.iter().map(|x| x.to_string())
}

fn scan(lab: &Lab, s: &ScanMedialSpec, csv: &Path) -> Result<Done> {
    let grid = GridSpec::uniform(s.lo.clone(), s.hi.clone(), s.resolution)?;
    let mut params = ScanParams::new(lab.thresholds);
    if s.jumps {
        params = params.with_jumps(s.jump_tol);
    }
    for (k, p) in &s.probes {
        params = params.with_probe(k, p.clone());
    }
    let report = scan_medial(&lab.index, &grid, &params)?;
    report.write_csv(csv)?;

    let lambda = report.lambda;
    let grid_flags = report.samples.iter().filter(|x| x.method == MedialMethod::GridSpread);
    let weakest = grid_flags.map(|x| x.spread).fold(f64::INFINITY, f64::min);
    let mut checks = vec![Check::new(
        "flagged nodes reach lambda",
        weakest >= lambda,
        format!("{} flagged nodes, smallest spread {weakest} vs lambda {lambda}", report.flagged_count()),
    )];
    let jumps: Vec<_> = report
        .samples
        .iter()
        .filter(|x| x.method == MedialMethod::JumpBisection)
        .collect();
    let widest = jumps.iter().map(|x| x.bracket).fold(0.0, f64::max);
    checks.push(Check::new(
        "jump brackets within tolerance",
        widest <= s.jump_tol,
        format!("{} jump samples, widest bracket {widest} vs tolerance {}", jumps.len(), s.jump_tol),
    ));
    if let (Some(k), Some(locus)) = (s.oracle_steps, lab.shape.exact_medial()) {
        let limit = k * grid.max_step() + s.jump_tol;
        let far = report
            .samples
            .iter()
            .map(|x| locus.distance(&x.location))
            .fold(0.0, f64::max);
        checks.push(Check::new(
            "samples near the analytic medial locus",
            far <= limit,
            format!("farthest sample {far} from the locus, limit {limit} ({k} grid steps)"),
        ));
    }

    let plot = PlotData {
        title: format!("medial scan `{}`", s.name),
        window: (s.lo.clone(), s.hi.clone()),
        colored: report.samples.iter().map(|x| (x.location.clone(), x.spread)).collect(),
        color_label: "near-set spread".into(),
        markers: s.probes.iter().map(|(k, p)| (k.clone(), p.clone())).collect(),
        ..PlotData::default()
    };
    Ok(Done {
        warnings: report.warnings.clone(),
        result: serde_json::to_value(&report)?,
        checks,
        plot,
    })
}

fn lne_field(lab: &Lab, s: &LneFieldSpec, seed: u64, csv: &Path) -> Result<Done> {
    let mut points = s.points.clone();
    let n = lab.cloud.len();
    let mut picked = sample(&mut rng(seed), n, s.random_points.min(n)).into_vec();
    picked.sort_unstable();
    points.extend(picked.into_iter().map(|i| lab.cloud.points[i].clone()));

    let graph = lab.graph();
    let mut reports = Vec::with_capacity(points.len());
    for (j, p) in points.iter().enumerate() {
        reports.push(lne_report(graph, p, &s.radii, s.sources, seed.wrapping_add(j as u64), true)?);
    }

    let dim = lab.dim();
    let mut w = csv::Writer::from_path(csv)?;
    let mut header = vec!["point".to_string()];
    header.extend(coords("x", dim));
    header.extend(["radius", "constant", "pair_count", "vacuous", "verdict"].map(String::from));
    w.write_record(&header)?;
    for (j, r) in reports.iter().enumerate() {
        for d in &r.details {
            let mut row = vec![j.to_string()];
            row.extend(nums(&r.point));
            row.extend([
                d.radius.to_string(),
                d.constant.to_string(),
                d.pair_count.to_string(),
                d.vacuous.to_string(),
                json!(r.verdict).as_str().unwrap_or_default().to_string(),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io(csv, e))?;

    let smallest = reports
        .iter()
        .flat_map(|r| r.constants.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let checks = vec![Check::new(
        "constants at least 1",
        smallest >= 1.0 - 1e-12,
        format!("smallest constant {smallest} over {} points", reports.len()),
    )];
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &reports {
        *counts.entry(json!(r.verdict).as_str().unwrap_or_default().to_string()).or_default() += 1;
    }
    let (lo, hi) = lab.shape.bounding_box();
    let plot = PlotData {
        title: format!("local LNE constants `{}`", s.name),
        window: (lo.to_vec(), hi.to_vec()),
        colored: reports
            .iter()
            .map(|r| (r.point.clone(), *r.constants.last().unwrap_or(&1.0)))
            .collect(),
        color_label: "constant at smallest radius".into(),
        ..PlotData::default()
    };
    Ok(Done {
        result: json!({ "verdict_counts": counts, "points": reports }),
        checks,
        plot,
        warnings: Vec::new(),
    })
}

fn lipschitz(lab: &Lab, s: &LipschitzSpec, seed: u64, csv: &Path) -> Result<Done> {
    let th = &lab.thresholds;
    let region = ProbeRegion::certify(&lab.index, th, &s.center, s.radius, s.grid_step, s.search_margin)?;
    let rep = lipschitz_quotient(&lab.index, th, &region, s.pairs, seed)?;

    let dim = lab.dim();
    let mut w = csv::Writer::from_path(csv)?;
    let mut header: Vec<String> = coords("c", dim).collect();
    header.extend(
        [
            "radius",
            "delta",
            "sup_dist",
            "grid_step",
            "empirical_quotient",
            "explicit_bound",
            "pair_count",
            "on_set_quotient",
            "on_set_bound",
            "fill_distance",
            "lambda",
            "seed",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    let mut row: Vec<String> = nums(&region.center).collect();
    row.extend([
        region.radius.to_string(),
        region.delta.to_string(),
        region.sup_dist.to_string(),
        region.grid_step.to_string(),
        rep.empirical_quotient.to_string(),
        rep.explicit_bound.to_string(),
        rep.pair_count.to_string(),
        rep.on_set_quotient.to_string(),
        rep.on_set_bound.to_string(),
        rep.fill_distance.to_string(),
        rep.lambda.to_string(),
        rep.seed.to_string(),
    ]);
    w.write_record(&row)?;
    w.flush().map_err(|e| Error::io(csv, e))?;

    let checks = vec![
        Check::new(
            "quotient within bound",
            rep.within_bound(),
            format!("{} vs 2(delta + sup d)/delta = {}", rep.empirical_quotient, rep.explicit_bound),
        ),
        Check::new(
            "on-set quotient within 2 + 4h/s",
            rep.on_set_within_bound(),
            format!(
                "{} vs {} over {} pairs",
                rep.on_set_quotient, rep.on_set_bound, rep.on_set_pair_count
            ),
        ),
    ];
    let mut plot = PlotData {
        title: format!("Lipschitz probe `{}`", s.name),
        window: box_around(&s.center, s.radius + region.sup_dist),
        markers: vec![("region centre".into(), s.center.clone())],
        balls: vec![
            ("probe region".into(), s.center.clone(), s.radius),
            ("region + delta".into(), s.center.clone(), s.radius + region.delta),
        ],
        ..PlotData::default()
    };
    if let Some([p, q]) = &rep.worst_pair {
        plot.paths.push(("worst pair".into(), vec![p.clone(), q.clone()]));
    }
    Ok(Done {
        result: serde_json::to_value(&rep)?,
        checks,
        plot,
        warnings: Vec::new(),
    })
}

fn theorem(lab: &Lab, s: &VerifyTheoremSpec, seed: u64, csv: &Path) -> Result<Done> {
    let mut opts = TheoremOptions::for_dim(lab.dim(), seed);
    opts.sources = s.sources;
    opts.path_pairs = s.path_pairs;
    if let Some(r) = s.scan_resolution {
        opts.scan_resolution = r;
    }
    let v = verify_theorem(lab, &s.point, &s.radii, &opts)?;

    let mut w = csv::Writer::from_path(csv)?;
    w.write_record([
        "radius",
        "lne_constant",
        "pair_count",
        "medial_distance",
        "path_pairs",
        "paths_succeeded",
    ])?;
    for (k, &r) in v.radii.iter().enumerate() {
        let rect = v.rectifiability.iter().find(|c| c.radius == r);
        w.write_record([
            r.to_string(),
            v.lne.constants[k].to_string(),
            v.lne.details[k].pair_count.to_string(),
            v.medial_distances[k].map(|d| d.to_string()).unwrap_or_default(),
            rect.map(|c| c.pairs.to_string()).unwrap_or_default(),
            rect.map(|c| c.succeeded.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(csv, e))?;

    let mut checks = vec![
        Check::new(
            "consistent",
            v.consistent,
            format!(
                "verdict {:?} with constants {:?}; medial approach {}",
                v.lne_verdict, v.lne.constants, v.medial_approach
            ),
        ),
        Check::new(
            "projection paths rectifiable",
            v.rectifiable(),
            format!("{} medial-free balls checked", v.rectifiability.len()),
        ),
    ];
    if let Some(want) = s.expect_verdict {
        checks.push(Check::new(
            "expected verdict",
            v.lne_verdict == want,
            format!("{:?}, expected {want:?}", v.lne_verdict),
        ));
    }
    if let Some(want) = s.expect_medial_approach {
        checks.push(Check::new(
            "expected medial approach",
            v.medial_approach == want,
            format!("{}, expected {want}", v.medial_approach),
        ));
    }
    let plot = PlotData {
        title: format!("medial approach `{}`", s.name),
        window: box_around(&s.point, s.radii[0]),
        colored: v.medial_samples.iter().map(|x| (x.location.clone(), x.spread)).collect(),
        color_label: "near-set spread".into(),
        markers: vec![("probe point".into(), s.point.clone())],
        balls: s.radii.iter().map(|&r| (format!("r = {r}"), s.point.clone(), r)).collect(),
        ..PlotData::default()
    };
    Ok(Done {
        result: serde_json::to_value(&v)?,
        checks,
        plot,
        warnings: Vec::new(),
    })
}

fn conjecture(lab: &Lab, s: &ConjectureSpec, csv: &Path) -> Result<Done> {
    let t = match &s.medial_points {
        Some(xs) => conjecture_at(lab, &s.point, xs)?,
        None => {
            let mut opts = ConjectureOptions::for_dim(lab.dim(), s.initial_distance.unwrap_or(1.0));
            opts.count = s.count;
            opts.ratio = s.ratio;
            if let Some(r) = s.scan_resolution {
                opts.scan_resolution = r;
            }
            conjecture_probe(lab, &s.point, &opts)?
        }
    };

    let dim = lab.dim();
    let mut w = csv::Writer::from_path(csv)?;
    let mut header = vec!["k".to_string()];
    header.extend(coords("xi", dim));
    header.extend(["outer", "inner", "ratio"].map(String::from));
    w.write_record(&header)?;
    for k in 0..t.ratios.len() {
        let mut row = vec![k.to_string()];
        row.extend(nums(&t.medial_points[k]));
        row.extend([t.outer[k].to_string(), t.inner[k].to_string(), t.ratios[k].to_string()]);
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(csv, e))?;

    let th = &lab.thresholds;
    let slack = th.epsilon_cap() + 1e-6 * th.scale;
    let excess = t
        .medial_points
        .iter()
        .zip(&t.witness_pairs)
        .flat_map(|(xi, pair)| {
            let d = lab.index.distance(xi);
            pair.iter().map(move |x| geom::dist(xi, x) - d)
        })
        .fold(0.0, f64::max);
    let h = th.fill_distance;
    let shortfall = t
        .outer
        .iter()
        .zip(&t.inner)
        .map(|(o, i)| o - 2.0 * h - i)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut checks = vec![
        Check::new(
            "witnesses are near points",
            excess <= slack,
            format!("largest excess over d(xi) {excess}, slack {slack}"),
        ),
        Check::new(
            "inner at least outer - 2h",
            t.ratios.is_empty() || shortfall <= 0.0,
            format!("{} witness pairs", t.ratios.len()),
        ),
    ];
    if let Some(want) = s.expect_diverges {
        checks.push(Check::new(
            "expected divergence",
            t.diverges == want,
            format!("ratios {:?}, expected diverges = {want}", t.ratios),
        ));
    }

    let mut pts: Vec<&Vec<f64>> = vec![&s.point];
    pts.extend(&t.medial_points);
    pts.extend(t.paths.iter().flat_map(|p| p.vertices.iter()));
    let reach = pts.iter().map(|x| geom::dist(x, &s.point)).fold(0.0, f64::max);
    let reach = if reach > 0.0 { reach } else { s.initial_distance.unwrap_or(0.1 * th.scale) };
    let plot = PlotData {
        title: format!("witness pairs `{}`", s.name),
        window: box_around(&s.point, reach),
        colored: t
            .medial_points
            .iter()
            .cloned()
            .zip(t.ratios.iter().copied())
            .collect(),
        color_label: "inner/outer ratio".into(),
        paths: t
            .paths
            .iter()
            .enumerate()
            .map(|(k, p)| (format!("geodesic k = {k}"), p.vertices.clone()))
            .collect(),
        markers: vec![("probe point".into(), s.point.clone())],
        ..PlotData::default()
    };
    Ok(Done {
        result: serde_json::to_value(&t)?,
        checks,
        plot,
        warnings: Vec::new(),
    })
}

/// Maps plot data to the plot plane: the identity for 2-d shapes, the slice
/// plane for 3-d shapes. The second value warns about an empty slice.
pub(crate) fn project(lab: &Lab, exp: &Experiment, data: &PlotData) -> std::result::Result<(Plot, Option<String>), String> {
    let dim = lab.dim();
    let (axes, slab) = match (dim, exp.slice()) {
        (2, _) => ([0, 1], None),
        (3, Some(sl)) => {
            let others: Vec<usize> = (0..3).filter(|&k| k != sl.axis).collect();
            let thick = sl
                .thickness
                .unwrap_or((4.0 * lab.fill_distance()).max(0.01 * lab.shape.scale()));
            ([others[0], others[1]], Some((sl.axis, sl.value, thick)))
        }
        _ => return Err(format!("no plot for {dim}-d data without a slice plane")),
    };
    let in_slab = |p: &[f64]| slab.is_none_or(|(a, v, t)| (p[a] - v).abs() <= t);
    let flat = |p: &[f64]| [p[axes[0]], p[axes[1]]];
    let (wlo, whi) = (&data.window.0, &data.window.1);
    let in_window = |p: &[f64]| (0..dim).all(|k| slab.is_some_and(|(a, ..)| a == k) || (p[k] >= wlo[k] && p[k] <= whi[k]));

    let near: Vec<[f64; 2]> = lab
        .cloud
        .points
        .iter()
        .filter(|p| in_slab(p) && in_window(p))
        .map(|p| flat(p))
        .collect();
    let stride = near.len().div_ceil(MAX_BACKGROUND).max(1);
    let background: Vec<[f64; 2]> = near.into_iter().step_by(stride).collect();
    let colored: Vec<([f64; 2], f64)> = data
        .colored
        .iter()
        .filter(|(p, _)| in_slab(p))
        .map(|(p, v)| (flat(p), *v))
        .collect();

    let mut paths: Vec<(String, Vec<[f64; 2]>)> = data
        .paths
        .iter()
        .map(|(l, v)| (l.clone(), v.iter().map(|p| flat(p)).collect()))
        .collect();
    for (label, c, r) in &data.balls {
        let off = slab.map_or(0.0, |(a, v, _)| c[a] - v);
        let rr = r * r - off * off;
        if rr <= 0.0 {
            continue;
        }
        let (rr, cc) = (rr.sqrt(), flat(c));
        let circle = (0..=96)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / 96.0;
                [cc[0] + rr * a.cos(), cc[1] + rr * a.sin()]
            })
            .collect();
        paths.push((label.clone(), circle));
    }

    let warning = slab
        .filter(|_| background.is_empty() && colored.is_empty())
        .map(|(a, v, t)| format!("slice plane x{a} = {v} (thickness {t}) misses all data; the plot is empty"));
    let subtitle = format!(
        "{}, {} samples, h = {:.3e}, lambda = {:.3e}, seed {}{}",
        lab.shape.spec().label(),
        lab.cloud.len(),
        lab.fill_distance(),
        lab.thresholds.lambda(),
        lab.cloud.seed,
        slab.map(|(a, v, _)| format!(", slice x{a} = {v}")).unwrap_or_default()
    );
    let plot = Plot {
        title: data.title.clone(),
        subtitle,
        x_label: format!("x{}", axes[0]),
        y_label: format!("x{}", axes[1]),
        background,
        colored,
        color_label: data.color_label.clone(),
        paths,
        markers: data
            .markers
            .iter()
            .filter(|(_, p)| in_slab(p))
            .map(|(l, p)| (l.clone(), flat(p)))
            .collect(),
        window: Some((flat(wlo), flat(whi))),
    };
    Ok((plot, warning))
}
