//! Deterministic verification and classification reports for multilinear
//! cross products: axiom checks, admissible forms, grading classification,
//! Weyl groups, and the Clifford/Spin machinery.
//!
//! Exit codes: 0 when every check passes, 1 on a check failure, 2 on input
//! errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crossalg::autgrp;
use crossalg::cayley::{Basis, CayleyElement};
use crossalg::crossprod::{
    self, AdmissibleForms, CrossProduct, VerifyOptions, DEFAULT_SEED,
};
use crossalg::gradings::{self, Classification83, WeylId};
use crossalg::linalg::{Matrix, QuadSpace};
use crossalg::scalar::Field;
use crossalg::serial;

#[derive(Parser)]
#[command(name = "crossalg", version, about)]
struct Cli {
    /// Field descriptor: Q, Fp:5, Q(i), Fp:5(sqrt:2)
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit the report as JSON
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for the search sweeps
    #[arg(long, global = true, default_value_t = 4)]
    threads: usize,
    /// Append wall-clock timings (excluded by default so reports are
    /// byte-identical across runs)
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the cross-product axioms and report all admissible forms
    Verify {
        /// One of: x1, xm1, c0, quat, star:N, onefold:N
        #[arg(long)]
        builtin: Option<String>,
        /// Cross product JSON file
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Grading verification, classification, Weyl groups
    Grading {
        #[command(subcommand)]
        sub: GradingCmd,
    },
    /// Spin / Clifford machinery and orbit censuses
    Spin {
        #[command(subcommand)]
        sub: SpinCmd,
    },
}

#[derive(Subcommand)]
enum GradingCmd {
    /// Classify a grading of the 8-dimensional triple system
    Classify {
        /// One of: cartan, cd, trivial
        #[arg(long)]
        builtin: Option<String>,
        /// Grading JSON file
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Check the closure and orthogonality conditions of a grading
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Weyl group order by formula; --oracle reruns it as a search
    Weyl {
        /// One of: cd, cartan-b3, g2-cartan, g2-elem2, fine:P,Q, onefold:S
        #[arg(long)]
        id: String,
        #[arg(long)]
        oracle: bool,
    },
    /// Fine gradings of the (n-1)-fold product with universal groups
    Finelist {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum SpinCmd {
    /// Related triple of a product of trace-zero vectors
    Triple {
        /// Comma-separated CD basis vectors, e.g. w1,w1
        #[arg(long)]
        vectors: String,
    },
    /// Orbit closure versus exhaustive enumeration over a small prime field
    Orbits {
        /// One of: unit_sphere, isotropic, pair
        #[arg(long)]
        target: String,
    },
    /// Dimension of the Lie algebra of the twisted orthogonal group
    Lie {
        #[arg(long)]
        n: usize,
    },
}

/// Accumulated report: echoed command, named checks, and free-form data
/// lines, rendered as text or JSON.
struct Report {
    command: String,
    field: String,
    checks: Vec<(String, bool, String)>,
    data: Vec<(String, Value)>,
}

impl Report {
    fn new(command: String, field: &Field) -> Report {
        Report {
            command,
            field: field.descriptor(),
            checks: Vec::new(),
            data: Vec::new(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push((name.to_string(), pass, detail.into()));
    }

    fn data(&mut self, key: &str, value: Value) {
        self.data.push((key.to_string(), value));
    }

    fn pass(&self) -> bool {
        self.checks.iter().all(|(_, p, _)| *p)
    }

    fn render(&self, as_json: bool, elapsed: Option<f64>) -> String {
        if as_json {
            let checks: Vec<Value> = self
                .checks
                .iter()
                .map(|(n, p, d)| json!({ "name": n, "pass": p, "detail": d }))
                .collect();
            let mut obj = json!({
                "command": self.command,
                "field": self.field,
                "checks": checks,
                "data": Value::Object(self.data.iter().cloned().collect()),
                "pass": self.pass(),
            });
            if let Some(t) = elapsed {
                obj["elapsed_seconds"] = json!(t);
            }
            serde_json::to_string_pretty(&obj).expect("report serializes")
        } else {
            let mut out = String::new();
            out.push_str(&format!("command: {}\n", self.command));
            out.push_str(&format!("field: {}\n", self.field));
            for (k, v) in &self.data {
                let rendered = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {rendered}\n"));
            }
            for (name, pass, detail) in &self.checks {
                let mark = if *pass { "PASS" } else { "FAIL" };
                if detail.is_empty() {
                    out.push_str(&format!("check {name}: {mark}\n"));
                } else {
                    out.push_str(&format!("check {name}: {mark} ({detail})\n"));
                }
            }
            out.push_str(&format!(
                "result: {}\n",
                if self.pass() { "PASS" } else { "FAIL" }
            ));
            if let Some(t) = elapsed {
                out.push_str(&format!("elapsed: {t:.3}s\n"));
            }
            out
        }
    }
}

#[derive(Debug)]
struct InputError(String);

fn build_builtin(name: &str, field: &Field) -> Result<CrossProduct, InputError> {
    let bad = |m: String| Err(InputError(m));
    match name {
        "x1" => crossprod::build_three_fold(1, &field.one(), field, Basis::Std)
            .map_err(|e| InputError(e.to_string())),
        "xm1" => crossprod::build_three_fold(-1, &field.one(), field, Basis::Std)
            .map_err(|e| InputError(e.to_string())),
        "c0" => Ok(crossprod::build_c0(field)),
        "quat" => {
            // the alternating quaternion product relative to the polar form
            let gram = Matrix::identity(field, 4).scale(&field.from_i64(2));
            let space = QuadSpace::new(gram).expect("2 id is nondegenerate");
            Ok(CrossProduct::from_tensor_fn(
                field,
                3,
                4,
                Some(space),
                |idx| {
                    let q = |i: usize| crossalg::cayley::QuaternionElement::basis_elem(field, i);
                    crossalg::cayley::quaternion_cross(&q(idx[0]), &q(idx[1]), &q(idx[2])).coords
                },
            ))
        }
        _ => {
            if let Some(nstr) = name.strip_prefix("star:") {
                let n: usize = nstr
                    .parse()
                    .map_err(|_| InputError(format!("bad star dimension {nstr:?}")))?;
                if n < 3 || n > 16 {
                    return bad(format!("star dimension {n} out of range 3..=16"));
                }
                return crossprod::build_star(QuadSpace::standard(field, n))
                    .map_err(|e| InputError(e.to_string()));
            }
            if let Some(nstr) = name.strip_prefix("onefold:") {
                let n: usize = nstr
                    .parse()
                    .map_err(|_| InputError(format!("bad dimension {nstr:?}")))?;
                if n == 0 || n % 2 == 1 || n > 16 {
                    return bad(format!("onefold dimension {n} must be even and <= 16"));
                }
                let j = standard_complex_structure(field, n);
                let (x, _b) = crossprod::build_one_fold(None, &j)
                    .map_err(|e| InputError(e.to_string()))?;
                return Ok(x);
            }
            bad(format!("unknown builtin {name:?}"))
        }
    }
}

fn standard_complex_structure(field: &Field, n: usize) -> Matrix {
    let mut j = Matrix::zero(field, n, n);
    for k in 0..n / 2 {
        j.set(2 * k, 2 * k + 1, field.from_i64(-1));
        j.set(2 * k + 1, 2 * k, field.one());
    }
    j
}

fn read_json(path: &PathBuf) -> Result<Value, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| InputError(format!("JSON parse error in {}: {e}", path.display())))
}

fn cmd_verify(
    builtin: Option<String>,
    input: Option<PathBuf>,
    field: &Field,
    opts: &VerifyOptions,
    report: &mut Report,
) -> Result<(), InputError> {
    let x = match (builtin, input) {
        (Some(name), None) => build_builtin(&name, field)?,
        (None, Some(path)) => {
            let v = read_json(&path)?;
            serial::cross_from_json(field, &v).map_err(|e| InputError(e.to_string()))?
        }
        _ => {
            return Err(InputError(
                "exactly one of --builtin and --input is required".into(),
            ))
        }
    };
    report.data("arity", json!(x.arity));
    report.data("dim", json!(x.dim));
    let space = x
        .gram
        .clone()
        .ok_or_else(|| InputError("cross product carries no bilinear form".into()))?;
    let rep = crossprod::verify_axioms(&x, &space, opts);
    report.check(
        "axiom1",
        rep.axiom1.ok,
        match &rep.axiom1.witness {
            Some(w) => format!("witness: {w}"),
            None => format!("{} polarized tuples", rep.axiom1.checked),
        },
    );
    let mode = match rep.a2_mode {
        crossprod::A2Mode::Exhaustive => "exhaustive",
        crossprod::A2Mode::Sampled => "sampled",
    };
    report.check(
        "axiom2",
        rep.axiom2.ok,
        match &rep.axiom2.witness {
            Some(w) => format!("witness: {w}"),
            None => format!("{mode}, {} tuples", rep.axiom2.checked),
        },
    );
    match crossprod::admissible_forms(&x, opts) {
        Ok(AdmissibleForms::Finite(forms)) => {
            let mus: Vec<String> = forms.iter().map(|(mu, _)| mu.to_string()).collect();
            report.data("admissible_scalars", json!(mus));
            report.check(
                "admissible_forms",
                !forms.is_empty(),
                format!("{} scaled forms", forms.len()),
            );
        }
        Ok(AdmissibleForms::Space { dim }) => {
            report.data("admissible_space_dim", json!(dim));
            report.check("admissible_forms", dim >= 1, format!("solution space dimension {dim}"));
        }
        Err(e) => {
            report.check("admissible_forms", false, e.to_string());
        }
    }
    Ok(())
}

fn classification_json(c: &Classification83) -> Value {
    match c {
        Classification83::CartanCoarsening { alpha } => json!({
            "family": "cartan",
            "alpha": alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        }),
        Classification83::GammaGH { h_set } => json!({
            "family": "subgroup",
            "H": h_set.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        }),
        Classification83::GammaGHK { h_set, k_set } => json!({
            "family": "shifted",
            "H": h_set.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "K": k_set.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
        }),
    }
}

fn cmd_grading(
    sub: GradingCmd,
    field: &Field,
    threads: usize,
    report: &mut Report,
) -> Result<(), InputError> {
    match sub {
        GradingCmd::Classify { builtin, input } => {
            let g = match (builtin, input) {
                (Some(name), None) => match name.as_str() {
                    "cartan" => gradings::cartan_grading(field),
                    "cd" => gradings::cd_grading(field),
                    "trivial" => {
                        let group = crossalg::abgroup::AbGroup::free(0);
                        let map = crossprod::build_triple_3c(field, Basis::Std);
                        let basis = (0..8)
                            .map(|i| {
                                (crossalg::linalg::basis_vec(field, 8, i), group.identity())
                            })
                            .collect();
                        gradings::Grading {
                            tag: gradings::StructureTag::Triple3C,
                            map,
                            group,
                            basis,
                        }
                    }
                    other => return Err(InputError(format!("unknown builtin {other:?}"))),
                },
                (None, Some(path)) => {
                    let v = read_json(&path)?;
                    serial::grading_from_json(&v).map_err(|e| InputError(e.to_string()))?
                }
                _ => {
                    return Err(InputError(
                        "exactly one of --builtin and --input is required".into(),
                    ))
                }
            };
            match gradings::classify_83(&g) {
                Ok(c) => {
                    report.data("classification", classification_json(&c));
                    report.check("classify", true, "");
                }
                Err(e) => report.check("classify", false, e.to_string()),
            }
        }
        GradingCmd::Verify { input } => {
            let v = read_json(&input)?;
            let g = serial::grading_from_json(&v).map_err(|e| InputError(e.to_string()))?;
            match gradings::verify_grading(&g) {
                Ok(rep) => {
                    report.check(
                        "closure",
                        rep.ok,
                        if rep.ok {
                            format!("{} tuples", rep.checked)
                        } else {
                            rep.violations.join("; ")
                        },
                    );
                }
                Err(e) => report.check("closure", false, e.to_string()),
            }
            if let Some(space) = &g.map.gram {
                match gradings::form_compatibility(&g, space) {
                    Ok((compat, h)) => {
                        report.data("distinguished_h", json!(h.to_string()));
                        report.data("compatible_with_b", json!(compat));
                        report.check("orthogonality", true, "");
                    }
                    Err(e) => report.check("orthogonality", false, e.to_string()),
                }
            }
            report.data("fine", json!(g.is_fine()));
        }
        GradingCmd::Weyl { id, oracle } => {
            let wid = parse_weyl_id(&id)?;
            let order = gradings::weyl_order(wid);
            report.data("weyl_order", json!(order));
            if oracle {
                match wid {
                    WeylId::Cd => {
                        let res = gradings::weyl_search_cd(threads);
                        report.data("search_raw", json!(res.raw));
                        report.data("search_stabilizer", json!(res.stabilizer));
                        report.data("search_order", json!(res.order));
                        report.check(
                            "oracle",
                            res.order == order,
                            format!("search found {}", res.order),
                        );
                    }
                    WeylId::FineN1 { p: 1, q: 1 } => {
                        let found = gradings::weyl_search_n1_11(field)
                            .map_err(|e| InputError(e.to_string()))?;
                        report.data("search_order", json!(found));
                        report.check(
                            "oracle",
                            found as u64 == order,
                            format!("search found {found}"),
                        );
                    }
                    _ => {
                        return Err(InputError(format!(
                            "no search oracle is wired for {id:?}"
                        )))
                    }
                }
            }
        }
        GradingCmd::Finelist { n } => {
            if n < 3 {
                return Err(InputError("need n >= 3".into()));
            }
            let mut rows = Vec::new();
            let mut p = n % 2;
            while p <= n {
                let q = (n - p) / 2;
                let (m, rels) = crossalg::abgroup::fine_n1_presentation(p, q);
                let group = crossalg::abgroup::AbGroup::from_presentation(m, &rels);
                rows.push(json!({
                    "p": p,
                    "q": q,
                    "universal_group": group.type_string(),
                    "weyl_order": gradings::weyl_order(WeylId::FineN1 { p, q }),
                }));
                p += 2;
            }
            report.data("fine_gradings", Value::Array(rows));
            report.check("finelist", true, "");
        }
    }
    Ok(())
}

fn parse_weyl_id(id: &str) -> Result<WeylId, InputError> {
    match id {
        "cd" => Ok(WeylId::Cd),
        "cartan-b3" => Ok(WeylId::CartanB3),
        "g2-cartan" => Ok(WeylId::G2Cartan),
        "g2-elem2" => Ok(WeylId::G2Elem2),
        _ => {
            if let Some(rest) = id.strip_prefix("fine:") {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() == 2 {
                    let p = parts[0].parse().map_err(|_| InputError(format!("bad p in {id:?}")))?;
                    let q = parts[1].parse().map_err(|_| InputError(format!("bad q in {id:?}")))?;
                    return Ok(WeylId::FineN1 { p, q });
                }
            }
            if let Some(rest) = id.strip_prefix("onefold:") {
                let s = rest.parse().map_err(|_| InputError(format!("bad s in {id:?}")))?;
                return Ok(WeylId::OneFold { s });
            }
            Err(InputError(format!("unknown Weyl id {id:?}")))
        }
    }
}

fn matrix_json(m: &Matrix) -> Value {
    serial::matrix_to_json(m)
}

fn cmd_spin(sub: SpinCmd, field: &Field, report: &mut Report) -> Result<(), InputError> {
    match sub {
        SpinCmd::Triple { vectors } => {
            let mut xs = Vec::new();
            for tok in vectors.split(',') {
                let tok = tok.trim();
                let idx = tok
                    .strip_prefix('w')
                    .and_then(|t| t.parse::<usize>().ok())
                    .filter(|&i| (1..=7).contains(&i))
                    .ok_or_else(|| {
                        InputError(format!("expected CD basis vectors w1..w7, got {tok:?}"))
                    })?;
                xs.push(CayleyElement::basis_elem(field, Basis::Cd, idx));
            }
            let (clifford, triple) =
                autgrp::spin_element_from_vectors(&xs).map_err(|e| InputError(e.to_string()))?;
            report.data("clifford_matrix", matrix_json(&clifford));
            report.data("f0", matrix_json(&triple.f0));
            report.data("f1", matrix_json(&triple.f1));
            report.data("f2", matrix_json(&triple.f2));
            report.check("related_triple", triple.validate().is_ok(), "");
            report.check("cyclic_symmetry", triple.cyclic_identities_hold(), "");
            let x3c = crossprod::build_triple_3c(field, Basis::Cd);
            report.check(
                "spin_image_is_automorphism",
                autgrp::is_automorphism(&triple.f2, &x3c),
                "",
            );
        }
        SpinCmd::Orbits { target } => {
            let t = match target.as_str() {
                "unit_sphere" => autgrp::OrbitTarget::UnitSphere,
                "isotropic" => autgrp::OrbitTarget::Isotropic,
                "pair" => autgrp::OrbitTarget::Pair,
                other => return Err(InputError(format!("unknown target {other:?}"))),
            };
            let rep = autgrp::orbit_census(field, t).map_err(|e| InputError(e.to_string()))?;
            report.data("orbit_size", json!(rep.orbit_size));
            report.data("target_size", json!(rep.target_size));
            report.data("generators", json!(rep.generators));
            report.data("doubled", json!(rep.doubled));
            report.check(
                "orbit_equals_target",
                rep.equal,
                format!("{} = {}", rep.orbit_size, rep.target_size),
            );
        }
        SpinCmd::Lie { n } => {
            let space = QuadSpace::standard(field, n);
            let lie = autgrp::lie_otilde(&space);
            report.data("dim", json!(lie.dim));
            report.data("contains_id", json!(lie.contains_id));
            let so_dim = n * (n - 1) / 2;
            let char_divides = n >= 2 && {
                let c = field.characteristic();
                c != 0 && ((n - 2) as u64 % c == 0)
            };
            let expected = if char_divides { so_dim + 1 } else { so_dim };
            report.check(
                "dimension_dichotomy",
                lie.dim == expected && lie.contains_id == char_divides,
                format!("expected {expected}, id {}", char_divides),
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let field = match Field::parse(&cli.field) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: bad field {:?}: {e}", cli.field);
            return ExitCode::from(2);
        }
    };
    let opts = VerifyOptions {
        seed: cli.seed,
        ..VerifyOptions::default()
    };
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let mut report = Report::new(echo, &field);
    let result = match cli.cmd {
        Cmd::Verify { builtin, input } => cmd_verify(builtin, input, &field, &opts, &mut report),
        Cmd::Grading { sub } => cmd_grading(sub, &field, cli.threads, &mut report),
        Cmd::Spin { sub } => cmd_spin(sub, &field, &mut report),
    };
    match result {
        Ok(()) => {
            let elapsed = cli.timings.then(|| started.elapsed().as_secs_f64());
            print!("{}", report.render(cli.json, elapsed));
            if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
