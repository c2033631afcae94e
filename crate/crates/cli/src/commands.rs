use std::path::{Path, PathBuf};

use bm_core::asymmetry::{asymmetry, verify_contact_points};
use bm_core::certify::{
    certify_sandwich, enumerate_nice_octahedra, normalize_columns, CertificationFailure, OperatorT,
};
use bm_core::equidistant::{
    certify_equidistance, grid_r_values, k_range, pentagon, random_symmetric_polygon, standard_symmetric_bodies,
    EquidistanceCertificate, PentagonParams, UBasis,
};
use bm_core::json::{vector_strings, MatrixJson, PolytopeJson};
use bm_core::lemma::{claim3d_check, corner_classify, sample_valid_parallelogram, SamplerConfig};
use bm_core::polytope::{convex_hull_2d, polygon_to_h, Halfspace, VPolytope, MAX_DIM, MIN_DIM};
use bm_core::rational::{int, parse, q, to_canonical};
use bm_core::search::{optimize, SearchConfig, SearchReport};
use bm_core::{Error, QMatrix, Rational};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::manifest::RunManifest;
use crate::Command;

pub struct Output {
    pub stdout: String,
    pub summary: String,
}

pub enum Failure {
    /// Invalid input or usage; exit code 2.
    Usage(String),
    /// Certification or property failure; exit code 1. `stdout` carries the witness.
    Property { stdout: String, summary: String },
}

type CmdResult = Result<Output, Failure>;

fn json_failure(witness: Value, summary: impl Into<String>) -> Failure {
    Failure::Property {
        stdout: serde_json::to_string_pretty(&witness).expect("json") + "\n",
        summary: summary.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InclusionFailed { .. }
            | Error::CertificationRegression { .. }
            | Error::TheoremViolation { .. }
            | Error::AsymmetryMismatch { .. }
            | Error::SamplingExhausted(_)
            | Error::NotFound(_)
            | Error::NoContainingSubtriangle
            | Error::NoParallelPair
            | Error::MultiplePairs(_) => json_failure(json!({ "status": "failed", "error": e.to_string() }), e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<Vec<u8>, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    manifest.record_input(path, &bytes);
    Ok(bytes)
}

fn read_json<T: DeserializeOwned>(path: &Path, manifest: &mut RunManifest) -> Result<T, Failure> {
    let bytes = read_input(path, manifest)?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_toml<T: DeserializeOwned>(path: &Path, manifest: &mut RunManifest) -> Result<T, Failure> {
    let bytes = read_input(path, manifest)?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path, manifest: &mut RunManifest) -> Result<QMatrix, Failure> {
    let j: MatrixJson = read_json(path, manifest)?;
    if !(MIN_DIM..=MAX_DIM).contains(&j.n) {
        return Err(Error::UnsupportedDimension(j.n).into());
    }
    Ok(QMatrix::try_from(&j)?)
}

fn read_polygon(path: &Path, manifest: &mut RunManifest) -> Result<VPolytope, Failure> {
    let j: PolytopeJson = read_json(path, manifest)?;
    if j.n != 2 {
        return Err(Failure::Usage(format!("{}: expected a planar polygon, got n = {}", path.display(), j.n)));
    }
    Ok(convex_hull_2d(VPolytope::try_from(&j)?.vertices())?)
}

fn parse_rational(name: &str, s: &str) -> Result<Rational, Failure> {
    parse(s).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn s(x: &Rational) -> String {
    to_canonical(x)
}

fn halfspace_json(h: &Halfspace) -> Value {
    json!({ "normal": vector_strings(&h.normal), "offset": s(&h.offset) })
}

fn polytope_json(p: &VPolytope) -> Value {
    serde_json::to_value(PolytopeJson::from(p)).expect("json")
}

fn matrix_json(m: &QMatrix) -> Value {
    serde_json::to_value(MatrixJson::from(m)).expect("json")
}

pub fn run(command: &Command, manifest: &mut RunManifest) -> CmdResult {
    match command {
        Command::Certify { matrix, r, normalize } => certify(matrix, r, *normalize, manifest),
        Command::EnumNice { out } => enum_nice(out),
        Command::Search {
            n,
            restarts,
            seed,
            max_iters,
            max_denominator,
            config,
        } => {
            let mut cfg = match config {
                Some(path) => read_toml::<SearchConfig>(path, manifest)?,
                None => SearchConfig::default(),
            };
            cfg.n = n.unwrap_or(cfg.n);
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.max_iters = max_iters.unwrap_or(cfg.max_iters);
            cfg.max_denominator = max_denominator.unwrap_or(cfg.max_denominator);
            search(&cfg, manifest)
        }
        Command::Asym { polygon } => asym(polygon, manifest),
        Command::Pentagon { r, k, json } => pentagon_cmd(r, k, *json),
        Command::Equidist { r, k, body } => equidist(r, k, body, manifest),
        Command::EquidistSweep { grid } => sweep(grid, manifest),
        Command::Lemma2d { r, trials, seed } => lemma2d(r, *trials, seed.unwrap_or(0), manifest),
        Command::Claim3d { matrix } => claim3d(matrix, manifest),
        Command::Report { dims, restarts, seed } => report(dims, *restarts, seed.unwrap_or(42), manifest),
    }
}

fn certify(path: &Path, r: &str, normalize: bool, manifest: &mut RunManifest) -> CmdResult {
    let m = read_matrix(path, manifest)?;
    let r = parse_rational("r", r)?;
    if r <= int(0) {
        return Err(Failure::Usage("r must be positive".into()));
    }
    let mut op = OperatorT::new(m)?;
    if normalize {
        op = normalize_columns(&op)?;
    }
    match certify_sandwich(&op, &r) {
        Ok(cert) => {
            let out = json!({
                "status": "certified",
                "n": op.n(),
                "r": s(&cert.r),
                "matrix": matrix_json(op.matrix()),
                "r_inner": s(&cert.r_inner),
                "r_outer": s(&cert.r_outer),
                "ratio": s(&cert.ratio),
                "inner_witness": vector_strings(&cert.inner_witness),
                "outer_witness_column": cert.outer_witness_column,
            });
            Ok(Output {
                stdout: pretty(&out),
                summary: format!("certified at r = {}", s(&r)),
            })
        }
        Err(CertificationFailure::NonPositiveRadius(_)) => Err(Failure::Usage("r must be positive".into())),
        Err(CertificationFailure::Violation(v)) => {
            let witness = json!({
                "status": "violated",
                "n": op.n(),
                "r": s(&r),
                "inclusion": v.inclusion,
                "vertex_index": v.vertex_index,
                "vertex": vector_strings(&v.vertex),
                "halfspace_index": v.halfspace_index,
                "halfspace": halfspace_json(&v.halfspace),
                "r_inner": s(&bm_core::certify::inner_radius(&op)),
                "r_outer": s(&bm_core::certify::outer_radius(&op)),
            });
            Err(json_failure(witness, format!("violation at r = {}", s(&r))))
        }
    }
}

fn enum_nice(out: &Path) -> CmdResult {
    std::fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    let family = enumerate_nice_octahedra();
    let r = q(5, 9);
    let mut entries = Vec::with_capacity(family.len());
    for (i, m) in family.iter().enumerate() {
        let op = OperatorT::new(m.clone())?;
        let cert = certify_sandwich(&op, &r).map_err(|e| {
            json_failure(json!({ "status": "failed", "index": i, "matrix": matrix_json(m), "error": format!("{e:?}") }), "enumerated matrix fails")
        })?;
        let file = format!("nice_{i:03}.json");
        write_file(&out.join(&file), &pretty(&matrix_json(m)))?;
        entries.push(json!({ "file": file, "certified_r": s(&cert.r), "ratio": s(&cert.ratio) }));
    }
    let index = json!({ "count": family.len(), "matrices": entries });
    write_file(&out.join("manifest.json"), &pretty(&index))?;
    Ok(Output {
        stdout: pretty(&json!({ "count": family.len(), "out": out.display().to_string() })),
        summary: format!("wrote {} matrices", family.len()),
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn search_table(r: &SearchReport) -> String {
    format!(
        "n  float ratio       exact ratio  theorem  sqrt(n/2)  nice\n{:<2} {:<17.12} {:<12} {:<8} {:<10.4} {}\n",
        r.n,
        r.best_float_ratio,
        s(&r.exact_ratio),
        r.theorem_value.as_deref().unwrap_or("-"),
        r.conjecture_constant,
        r.is_nice.map_or("-".to_string(), |b| b.to_string()),
    )
}

fn search(cfg: &SearchConfig, manifest: &mut RunManifest) -> CmdResult {
    manifest.record_seed("search", cfg.seed);
    let report = optimize(cfg)?;
    eprint!("{}", search_table(&report));
    Ok(Output {
        stdout: serde_json::to_string_pretty(&report).expect("json") + "\n",
        summary: format!("n = {}: exact ratio {}", report.n, s(&report.exact_ratio)),
    })
}

fn asym(path: &Path, manifest: &mut RunManifest) -> CmdResult {
    let k = read_polygon(path, manifest)?;
    let h = polygon_to_h(&k)?;
    let res = asymmetry(&k, &h)?;
    let contacts = verify_contact_points(&k, &h, &res);
    let out = json!({
        "as": s(&res.as_value),
        "center": vector_strings(&res.center),
        "contacts": contacts,
        "center_unique": res.center_unique,
        "tight_pairs": res.tight_pairs,
        "polygon": polytope_json(&k),
    });
    if res.as_value != int(1) && contacts < 3 {
        return Err(json_failure(out, "fewer than three contact points"));
    }
    Ok(Output {
        stdout: pretty(&out),
        summary: format!("as = {}", s(&res.as_value)),
    })
}

fn params(r: &str, k: &str) -> Result<PentagonParams, Failure> {
    Ok(PentagonParams::new(parse_rational("r", r)?, parse_rational("k", k)?)?)
}

fn pentagon_cmd(r: &str, k: &str, as_json: bool) -> CmdResult {
    let p = pentagon(&params(r, k)?, &UBasis::default());
    let stdout = if as_json {
        pretty(&polytope_json(&p))
    } else {
        p.vertices().iter().map(|v| vector_strings(v).join(" ") + "\n").collect()
    };
    Ok(Output {
        stdout,
        summary: format!("{} vertices", p.len()),
    })
}

fn certificate_json(c: &EquidistanceCertificate) -> Value {
    let t = &c.triangle;
    json!({
        "certified": true,
        "params": { "r": s(c.params.r()), "k": s(c.params.k()) },
        "pentagon": polytope_json(&c.k),
        "homothetic_copy": polytope_json(&c.k_prime),
        "body": polytope_json(&c.l_input),
        "triangle": {
            "indices": t.indices,
            "vertices": t.vertices.iter().map(vector_strings).collect::<Vec<_>>(),
            "area": s(&t.area()),
        },
        "labeled_triangle": c.normalization.labeled.iter().map(vector_strings).collect::<Vec<_>>(),
        "map": {
            "linear": matrix_json(&c.normalization.map.linear),
            "translation": vector_strings(&c.normalization.map.translation),
        },
        "normalized_body": polytope_json(&c.normalization.l0),
        "inclusions": c.inclusions,
        "asymmetry": {
            "as": s(&c.as_check.as_value),
            "center": vector_strings(&c.as_check.center),
            "tight_pairs": c.as_check.tight_pairs,
        },
        "sandwich_ratio": s(&c.sandwich_ratio),
    })
}

fn equidist(r: &str, k: &str, body: &Path, manifest: &mut RunManifest) -> CmdResult {
    let params = params(r, k)?;
    let l = read_polygon(body, manifest)?;
    let cert = certify_equidistance(&params, &l)?;
    Ok(Output {
        stdout: pretty(&certificate_json(&cert)),
        summary: format!("d(K, L) = {}", s(&cert.sandwich_ratio)),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    /// `r` values as `"p/q"`; defaults to the standard grid.
    r: Option<Vec<String>>,
    /// Evenly spaced `k` values per `r`, endpoints included.
    #[serde(default = "default_k_points")]
    k_points: usize,
    /// Named bodies: square, hexagon, octagon.
    bodies: Option<Vec<String>>,
    #[serde(default)]
    body_files: Vec<PathBuf>,
    #[serde(default)]
    random_bodies: usize,
    #[serde(default)]
    seed: u64,
}

fn default_k_points() -> usize {
    3
}

fn k_values(r: &Rational, points: usize) -> Vec<Rational> {
    let (lo, hi) = k_range(r);
    if points <= 1 {
        return vec![lo];
    }
    let steps = points as i64 - 1;
    (0..points as i64).map(|i| &lo + (&hi - &lo) * q(i, steps)).collect()
}

fn sweep(path: &Path, manifest: &mut RunManifest) -> CmdResult {
    let grid: GridSpec = read_toml(path, manifest)?;
    manifest.record_seed("random_bodies", grid.seed);
    if grid.k_points == 0 {
        return Err(Failure::Usage("k_points must be positive".into()));
    }
    let rs = match &grid.r {
        Some(v) => v.iter().map(|x| parse_rational("r", x)).collect::<Result<Vec<_>, _>>()?,
        None => grid_r_values(),
    };
    let named = standard_symmetric_bodies();
    let mut bodies: Vec<(String, VPolytope)> = Vec::new();
    match &grid.bodies {
        Some(names) => {
            for name in names {
                let (_, b) = named
                    .iter()
                    .find(|(n, _)| n == name)
                    .ok_or_else(|| Failure::Usage(format!("unknown body {name:?}")))?;
                bodies.push((name.clone(), b.clone()));
            }
        }
        None => bodies.extend(named.iter().map(|(n, b)| (n.to_string(), b.clone()))),
    }
    for file in &grid.body_files {
        bodies.push((file.display().to_string(), read_polygon(file, manifest)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    for i in 0..grid.random_bodies {
        bodies.push((format!("random-{i}"), random_symmetric_polygon(&mut rng)));
    }

    let mut jobs = Vec::new();
    for r in &rs {
        for k in k_values(r, grid.k_points) {
            let p = PentagonParams::new(r.clone(), k)?;
            for (name, body) in &bodies {
                jobs.push((p.clone(), name.clone(), body));
            }
        }
    }
    let rows: Vec<(bool, String)> = jobs
        .par_iter()
        .map(|(p, name, body)| {
            let (ok, verdict, as_value) = match certify_equidistance(p, body) {
                Ok(c) => (c.is_tight(), if c.is_tight() { "certified".into() } else { "not-tight".into() }, s(&c.as_check.as_value)),
                Err(e) => (false, format!("failed: {e}").replace(',', ";"), String::new()),
            };
            (ok, format!("{},{},{},{},{}\n", s(p.r()), s(p.k()), name, verdict, as_value))
        })
        .collect();
    let failures = rows.iter().filter(|(ok, _)| !ok).count();
    let mut csv = String::from("r,k,body,verdict,as\n");
    csv.extend(rows.into_iter().map(|(_, line)| line));
    let summary = format!("{} combinations, {failures} failed", jobs.len());
    if failures > 0 {
        return Err(Failure::Property { stdout: csv, summary });
    }
    Ok(Output { stdout: csv, summary })
}

fn lemma2d(r: &str, trials: usize, seed: u64, manifest: &mut RunManifest) -> CmdResult {
    let r = parse_rational("r", r)?;
    if r <= int(0) || r >= int(1) {
        return Err(Failure::Usage("r must lie strictly between 0 and 1".into()));
    }
    manifest.record_seed("lemma2d", seed);
    let config = SamplerConfig::default();
    let rows: Vec<(bool, String)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s_i = seed.wrapping_add(i);
            match sample_valid_parallelogram(s_i, &r, &config) {
                Ok(p) => {
                    let c = corner_classify(&p);
                    let ok = c.all_ones();
                    let verdict = if ok { "one-per-corner" } else { "violated" };
                    let counts: Vec<String> = c.counts.values().map(usize::to_string).collect();
                    let coords = [p.p(), p.q()].map(|v| vector_strings(v).join(","));
                    (ok, format!("{s_i},{verdict},{},{},{},{}\n", coords[0], coords[1], counts.join(","), c.outside))
                }
                Err(_) => (false, format!("{s_i},exhausted,,,,,,,,,\n")),
            }
        })
        .collect();
    let failures = rows.iter().filter(|(ok, _)| !ok).count();
    let mut csv = String::from("seed,verdict,p_x,p_y,q_x,q_y,corner_--,corner_-+,corner_+-,corner_++,outside\n");
    csv.extend(rows.into_iter().map(|(_, line)| line));
    let summary = format!("{trials} trials at r = {}, {failures} not one-per-corner", s(&r));
    if failures > 0 {
        return Err(Failure::Property { stdout: csv, summary });
    }
    Ok(Output { stdout: csv, summary })
}

fn claim3d(path: &Path, manifest: &mut RunManifest) -> CmdResult {
    let m = read_matrix(path, manifest)?;
    if m.n() != 3 {
        return Err(Failure::Usage(format!("claim3d needs a 3x3 matrix, got n = {}", m.n())));
    }
    let op = OperatorT::new(m)?;
    let rep = match claim3d_check(&op) {
        Ok(rep) => rep,
        Err(Error::PreconditionViolated(msg)) => {
            return Err(json_failure(json!({ "status": "precondition", "error": msg }), "operator does not certify at 5/9"))
        }
        Err(e) => return Err(e.into()),
    };
    let out = json!({
        "holds": rep.holds(),
        "all_in_v": rep.all_in_v,
        "occupancy": rep.occupancy,
        "occupied_cubes": rep.occupied_cubes,
        "max_per_cube": rep.max_per_cube,
    });
    if !rep.holds() {
        return Err(json_failure(out, "vertex localization fails"));
    }
    Ok(Output {
        stdout: pretty(&out),
        summary: format!("{} corner cubes occupied", rep.occupied_cubes),
    })
}

fn parse_dims(dims: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("--dims: expected a range such as 2..4, got {dims:?}"));
    let (lo, hi) = match dims.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let n = dims.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo > hi || lo < MIN_DIM || hi > MAX_DIM {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn report(dims: &str, restarts: Option<usize>, seed: u64, manifest: &mut RunManifest) -> CmdResult {
    let dims = parse_dims(dims)?;
    manifest.record_seed("report", seed);
    let mut md = String::from("| n | best exact ratio | theorem value | sqrt(n/2) |\n|---|---|---|---|\n");
    for n in dims {
        let cfg = SearchConfig {
            n,
            seed,
            restarts: restarts.unwrap_or(SearchConfig::default().restarts),
            ..SearchConfig::default()
        };
        let r = optimize(&cfg)?;
        md.push_str(&format!(
            "| {n} | {} | {} | {:.4} |\n",
            s(&r.exact_ratio),
            r.theorem_value.as_deref().unwrap_or("unknown"),
            r.conjecture_constant
        ));
    }
    Ok(Output {
        stdout: md,
        summary: "report written".into(),
    })
}
