//! Command-line interface for the aritoric verification toolkit.
//!
//! Exit codes: 0 = verified / success, 1 = verification failed, 2 = input
//! or usage error.  Structured output (`--format structured`) is stable
//! byte-for-byte across runs for identical inputs and carries a `schema`
//! field per command.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use aritoric::arith::{sha_norm_one_biquadratic, zhe_of_norm_one, BiquadraticField, ShaMethod};
use aritoric::descent::{
    descend_collection, no_point_certificate, rationality_check, DescentError, FieldLabel,
    LiftObstruction, RationalityReport,
};
use aritoric::divclass::{cohomology, TDivisor};
use aritoric::excol::{
    build_ct_collection, numerical_fullness, verify_exceptional_collection, ExtEngine,
};
use aritoric::fan::{build_an_fan, fan_aut, is_complete, is_smooth, Fan};
use aritoric::formats::{
    content_hash, read_action, read_collection, read_fan, resolve_action, write_collection,
    write_fan, GroupSpec, LatticeFile,
};
use aritoric::gmodule::{sha_omega, FiniteGroup, GLattice};
use aritoric::zlattice::AbelianGroupInvariants;

#[derive(Parser)]
#[command(
    name = "aritoric",
    version,
    about = "Verification toolkit for arithmetic toric varieties: fans, exceptional collections, Galois descent, and Tate-Shafarevich computations"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Worker threads for Ext computations (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Build a bundled fan (and optionally its pinned collection)
    Build {
        /// Fan family: only "an" (the type-A Weyl chamber fan) is bundled
        kind: String,
        /// Rank parameter n of the family, 1..=3
        #[arg(long)]
        n: usize,
        /// Where to write the fan file
        #[arg(long)]
        out: PathBuf,
        /// Also write the pinned exceptional collection to this path
        #[arg(long)]
        with_collection: Option<PathBuf>,
    },
    /// Verify that a collection is exceptional and numerically full
    Verify {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        collection: PathBuf,
        /// Additionally require all forward Ext in degree zero
        #[arg(long)]
        require_strong: bool,
    },
    /// Partition a collection into Galois orbits and check lift obstructions
    Descend {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        action: PathBuf,
    },
    /// Tate-Shafarevich group of a norm-one torus or of an explicit lattice
    Sha {
        /// Radicands a b of the biquadratic field Q(sqrt(a), sqrt(b))
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
        biquadratic: Option<Vec<i64>>,
        /// Lattice file (rank + generator matrices) for a direct Sha_omega
        #[arg(long, requires = "group")]
        lattice: Option<PathBuf>,
        /// Group file (a group spec document) for the lattice action
        #[arg(long, requires = "lattice")]
        group: Option<PathBuf>,
    },
    /// Picard-action rationality criterion for a Galois action on a fan
    Rationality {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        action: PathBuf,
    },
    /// No-rational-point certificate: descent plus a nontrivial Zhe
    Certificate {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        action: PathBuf,
    },
    /// Cohomology of a torus-invariant divisor
    Coh {
        #[arg(long)]
        fan: PathBuf,
        /// One coefficient per ray, comma-separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Vec<i64>,
    },
    /// Ext dimensions between two objects of a collection
    Ext {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long)]
        collection: PathBuf,
        /// Label of the source object
        #[arg(long)]
        from: String,
        /// Label of the target object
        #[arg(long)]
        to: String,
    },
    /// Print the automorphism group of a fan in its canonical order
    Aut {
        #[arg(long)]
        fan: PathBuf,
    },
}

/// A command outcome: rendered report plus pass/fail for the exit code.
struct Outcome {
    human: String,
    structured: Value,
    passed: bool,
}

enum CliError {
    /// Input/usage problems: exit 2.
    Input(String),
}

macro_rules! input_error_from {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}

input_error_from!(
    aritoric::fan::FanError,
    aritoric::excol::ExcolError,
    aritoric::formats::FormatsError,
    aritoric::arith::ArithError,
    aritoric::gmodule::GModuleError,
    aritoric::descent::DescentError,
    aritoric::divclass::DivClassError
);

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match run(&cli.command) {
        Ok(outcome) => {
            let text = match cli.format {
                Format::Human => outcome.human.trim_end().to_string(),
                Format::Structured => {
                    serde_json::to_string_pretty(&outcome.structured).expect("serializable")
                }
            };
            // tolerate a closed pipe (e.g. `aritoric ... | head`)
            let mut stdout = std::io::stdout();
            let _ = writeln!(stdout, "{text}");
            let _ = stdout.flush();
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_fan(path: &Path) -> Result<(Fan, String), CliError> {
    let text = read_file(path)?;
    let fan = read_fan(&text)?;
    Ok((fan, text))
}

fn group_invariants_json(g: &AbelianGroupInvariants) -> Value {
    json!({
        "free_rank": g.free_rank,
        "torsion": g.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
}

fn group_invariants_human(g: &AbelianGroupInvariants) -> String {
    if g.is_trivial() {
        return "trivial".into();
    }
    let mut parts: Vec<String> = vec![];
    if g.free_rank > 0 {
        parts.push(format!("Z^{}", g.free_rank));
    }
    for t in &g.torsion {
        parts.push(format!("Z/{t}"));
    }
    parts.join(" + ")
}

fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Build { kind, n, out, with_collection } => cmd_build(kind, *n, out, with_collection.as_deref()),
        Command::Verify { fan, collection, require_strong } => {
            cmd_verify(fan, collection, *require_strong)
        }
        Command::Descend { fan, collection, action } => cmd_descend(fan, collection, action),
        Command::Sha { biquadratic, lattice, group } => {
            cmd_sha(biquadratic.as_deref(), lattice.as_deref(), group.as_deref())
        }
        Command::Rationality { fan, action } => cmd_rationality(fan, action),
        Command::Certificate { fan, collection, action } => {
            cmd_certificate(fan, collection, action)
        }
        Command::Coh { fan, coeffs } => cmd_coh(fan, coeffs),
        Command::Ext { fan, collection, from, to } => cmd_ext(fan, collection, from, to),
        Command::Aut { fan } => cmd_aut(fan),
    }
}

fn cmd_build(
    kind: &str,
    n: usize,
    out: &Path,
    with_collection: Option<&Path>,
) -> Result<Outcome, CliError> {
    if kind != "an" {
        return Err(CliError::Input(format!(
            "unknown fan family '{kind}' (only \"an\" is bundled)"
        )));
    }
    let fan = build_an_fan(n)?;
    let fan_text = write_fan(&fan);
    fs::write(out, &fan_text).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let mut written = vec![out.display().to_string()];
    if let Some(cpath) = with_collection {
        let (_, collection) = build_ct_collection(n)?;
        let ctext = write_collection(&collection, &fan_text);
        fs::write(cpath, &ctext)
            .map_err(|e| CliError::Input(format!("{}: {e}", cpath.display())))?;
        written.push(cpath.display().to_string());
    }
    let human = format!(
        "built A{n} fan: {} rays, {} maximal cones\nwrote {}",
        fan.rays.len(),
        fan.max_cones.len(),
        written.join(", ")
    );
    let structured = json!({
        "schema": "aritoric.build.v1",
        "family": "an",
        "n": n,
        "rays": fan.rays.len(),
        "max_cones": fan.max_cones.len(),
        "fan_hash": content_hash(fan_text.as_bytes()),
        "written": written,
    });
    Ok(Outcome { human, structured, passed: true })
}

fn cmd_verify(
    fan_path: &Path,
    collection_path: &Path,
    require_strong: bool,
) -> Result<Outcome, CliError> {
    let (fan, fan_text) = load_fan(fan_path)?;
    let collection = read_collection(&read_file(collection_path)?, &fan, &fan_text)?;
    let engine = ExtEngine::new(&fan);
    let report = verify_exceptional_collection(&engine, &collection)?;
    let fullness = numerical_fullness(&fan, &report.table);
    let passed = report.passed && fullness.passed && (!require_strong || report.strong);
    let mut lines = vec![
        format!("objects: {}", collection.len()),
        format!("exceptional: {}", if report.passed { "yes" } else { "NO" }),
    ];
    for fail in &report.failures {
        lines.push(format!("  violation: {fail}"));
    }
    lines.push(format!("strong: {}", if report.strong { "yes" } else { "no" }));
    lines.push(format!(
        "orthogonality blocks: {:?}",
        report.blocks.iter().map(|b| b.len()).collect::<Vec<_>>()
    ));
    lines.push(format!(
        "numerically full: {} (Gram size {} of expected {}, unit-triangular: {})",
        if fullness.passed { "yes" } else { "NO" },
        fullness.size,
        fullness.expected,
        fullness.unit_upper_triangular
    ));
    lines.push(format!("verdict: {}", if passed { "PASS" } else { "FAIL" }));
    let structured = json!({
        "schema": "aritoric.verify.v1",
        "labels": report.labels,
        "table": report.table.iter().map(|row| {
            row.iter().map(|d| d.dims.clone()).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
        "failures": report.failures,
        "strong": report.strong,
        "blocks": report.blocks,
        "numerically_full": fullness.passed,
        "gram_size": fullness.size,
        "gram_expected": fullness.expected,
        "unit_upper_triangular": fullness.unit_upper_triangular,
        "passed": passed,
    });
    Ok(Outcome { human: lines.join("\n"), structured, passed })
}

fn obstruction_json(o: &LiftObstruction) -> Value {
    match o {
        LiftObstruction::Vanished { adjusted_class } => json!({
            "vanished": true,
            "adjusted_class": adjusted_class.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }),
        LiftObstruction::Witness { stabilizer, cocycles } => json!({
            "vanished": false,
            "stabilizer": stabilizer,
            "cocycles": cocycles.iter().map(|(h, c)| json!({
                "element": h,
                "class": c.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn cmd_descend(
    fan_path: &Path,
    collection_path: &Path,
    action_path: &Path,
) -> Result<Outcome, CliError> {
    let (fan, fan_text) = load_fan(fan_path)?;
    let collection = read_collection(&read_file(collection_path)?, &fan, &fan_text)?;
    let action = resolve_action(&read_action(&read_file(action_path)?)?, &fan)?;
    match descend_collection(&action, &fan, &collection) {
        Ok(report) => {
            let mut lines = vec![format!(
                "group of order {} acting on {} objects: {} orbits",
                action.group.order(),
                collection.len(),
                report.orbits.len()
            )];
            for (i, orbit) in report.orbits.iter().enumerate() {
                lines.push(format!(
                    "orbit {i}: degree {} (stabilizer order {}), members [{}], obstruction {}",
                    orbit.etale_degree,
                    orbit.stabilizer.len(),
                    orbit.labels.join(", "),
                    if orbit.obstruction.vanished() { "vanished" } else { "WITNESS" }
                ));
            }
            lines.push(format!(
                "all obstructions vanished: {}",
                if report.all_vanished { "yes" } else { "NO" }
            ));
            let structured = json!({
                "schema": "aritoric.descend.v1",
                "group_order": action.group.order(),
                "orbits": report.orbits.iter().map(|o| json!({
                    "members": o.members,
                    "labels": o.labels,
                    "stabilizer": o.stabilizer,
                    "etale_degree": o.etale_degree,
                    "obstruction": obstruction_json(&o.obstruction),
                })).collect::<Vec<_>>(),
                "all_vanished": report.all_vanished,
            });
            Ok(Outcome {
                human: lines.join("\n"),
                structured,
                passed: report.all_vanished,
            })
        }
        Err(DescentError::NotStable(label)) => Ok(Outcome {
            human: format!(
                "descent failed: collection is not stable under the action (object '{label}')"
            ),
            structured: json!({
                "schema": "aritoric.descend.v1",
                "error": "not_stable",
                "object": label,
                "all_vanished": false,
            }),
            passed: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn cmd_sha(
    biquadratic: Option<&[i64]>,
    lattice: Option<&Path>,
    group: Option<&Path>,
) -> Result<Outcome, CliError> {
    match (biquadratic, lattice, group) {
        (Some(ab), None, None) => {
            let [a, b] = ab else {
                return Err(CliError::Input("--biquadratic takes exactly two integers".into()));
            };
            let field = BiquadraticField::new(*a, *b)?;
            let result = sha_norm_one_biquadratic(&field)?;
            let mut lines = vec![format!(
                "Sha^1 of the norm-one torus of Q(sqrt({a}), sqrt({b})): {}",
                group_invariants_human(&result.group)
            )];
            lines.push(
                match result.method {
                    ShaMethod::AllCyclicDecomposition => {
                        "method: all ramified decomposition groups cyclic; Sha_omega computed from cocycle linear algebra"
                    }
                    ShaMethod::NoncyclicDecompositionFound => {
                        "method: a ramified prime has the full Klein group as decomposition group; its local condition is trivializing"
                    }
                }
                .into(),
            );
            for r in &result.details {
                lines.push(format!(
                    "  prime {} | {}: legendre(other, p) = {}, decomposition group {}",
                    r.prime,
                    r.divides,
                    r.legendre,
                    if r.cyclic { "cyclic" } else { "noncyclic" }
                ));
            }
            let structured = json!({
                "schema": "aritoric.sha.v1",
                "field": { "a": a, "b": b },
                "group": group_invariants_json(&result.group),
                "method": match result.method {
                    ShaMethod::AllCyclicDecomposition => "all_cyclic_decomposition",
                    ShaMethod::NoncyclicDecompositionFound => "noncyclic_decomposition_found",
                },
                "primes": result.details.iter().map(|r| json!({
                    "prime": r.prime,
                    "divides": r.divides,
                    "legendre": r.legendre,
                    "cyclic": r.cyclic,
                })).collect::<Vec<_>>(),
            });
            Ok(Outcome { human: lines.join("\n"), structured, passed: true })
        }
        (None, Some(lattice_path), Some(group_path)) => {
            let lattice_file: LatticeFile = serde_json::from_str(&read_file(lattice_path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", lattice_path.display())))?;
            let group_spec: GroupSpec = serde_json::from_str(&read_file(group_path)?)
                .map_err(|e| CliError::Input(format!("{}: {e}", group_path.display())))?;
            let g = match &group_spec {
                GroupSpec::Name(name) => match name.as_str() {
                    "C2" => FiniteGroup::cyclic(2),
                    "C2xC2" => FiniteGroup::klein_four(),
                    other => {
                        return Err(CliError::Input(format!("unknown group name '{other}'")))
                    }
                },
                GroupSpec::Table { table, generators } => {
                    FiniteGroup::new(table.clone(), generators.clone())?
                }
            };
            let matrices = lattice_file.generator_matrices().ok_or_else(|| {
                CliError::Input("lattice generator matrices must be rank x rank".into())
            })?;
            if matrices.len() != g.generators().len() {
                return Err(CliError::Input(format!(
                    "expected {} generator matrices, got {}",
                    g.generators().len(),
                    matrices.len()
                )));
            }
            // the lattice constructor verifies unimodularity and the group
            // relations; surface violations as input errors, not panics
            let prev_hook = std::panic::take_hook();
            std::panic::set_hook(Box::new(|_| {}));
            let built = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                GLattice::from_generator_matrices(g, &matrices)
            }));
            std::panic::set_hook(prev_hook);
            let lattice = built.map_err(|_| {
                CliError::Input(
                    "generator matrices are not a unimodular action satisfying the group relations"
                        .into(),
                )
            })?;
            let result = sha_omega(&lattice);
            let human = format!("Sha_omega of the lattice: {}", group_invariants_human(&result));
            let structured = json!({
                "schema": "aritoric.sha.v1",
                "lattice_rank": lattice_file.rank,
                "group": group_invariants_json(&result),
                "method": "sha_omega",
            });
            Ok(Outcome { human, structured, passed: true })
        }
        _ => Err(CliError::Input(
            "pass either --biquadratic A B or both --lattice and --group".into(),
        )),
    }
}

fn cmd_rationality(fan_path: &Path, action_path: &Path) -> Result<Outcome, CliError> {
    let (fan, _) = load_fan(fan_path)?;
    let action = resolve_action(&read_action(&read_file(action_path)?)?, &fan)?;
    if !(is_smooth(&fan)? && is_complete(&fan)?) {
        return Err(CliError::Input("the rationality check needs a smooth complete fan".into()));
    }
    match rationality_check(&fan, &action) {
        RationalityReport::Rational { ray_orbit_degrees } => {
            let human = format!(
                "Rational: the Galois action on Pic is trivial.\netale algebra of the ray orbits: degrees {ray_orbit_degrees:?} (splits the torus into a quotient of a quasi-split one)"
            );
            let structured = json!({
                "schema": "aritoric.rationality.v1",
                "verdict": "rational",
                "ray_orbit_degrees": ray_orbit_degrees,
            });
            Ok(Outcome { human, structured, passed: true })
        }
        RationalityReport::Inconclusive { nontrivial_elements } => {
            let human = format!(
                "Inconclusive: {} group elements act nontrivially on Pic (criterion applies only to trivial Pic actions)",
                nontrivial_elements.len()
            );
            let structured = json!({
                "schema": "aritoric.rationality.v1",
                "verdict": "inconclusive",
                "nontrivial_elements": nontrivial_elements,
            });
            Ok(Outcome { human, structured, passed: false })
        }
    }
}

fn cmd_certificate(
    fan_path: &Path,
    collection_path: &Path,
    action_path: &Path,
) -> Result<Outcome, CliError> {
    let (fan, fan_text) = load_fan(fan_path)?;
    let collection = read_collection(&read_file(collection_path)?, &fan, &fan_text)?;
    let action = resolve_action(&read_action(&read_file(action_path)?)?, &fan)?;
    let zhe = match &action.field_label {
        Some(FieldLabel::Biquadratic(a, b)) => {
            let field = BiquadraticField::new(*a, *b)?;
            Some(zhe_of_norm_one(&field)?)
        }
        _ => None,
    };
    let (report, zhe_group) = match zhe {
        Some(z) => {
            let g = z.group.clone();
            (no_point_certificate(&fan, &action, &collection, &g), g)
        }
        None => {
            // no biquadratic label: the torus is split or unlabeled, Zhe is
            // trivial and no certificate can be issued
            let trivial = AbelianGroupInvariants { free_rank: 0, torsion: vec![] };
            let mut r = no_point_certificate(&fan, &action, &collection, &trivial);
            if !r.certified && r.reason.as_deref().map(|s| s.contains("trivial")) == Some(true) {
                r.reason =
                    Some("action carries no biquadratic field label: torus split, Zhe trivial".into());
            }
            (r, trivial)
        }
    };
    let mut lines = vec![];
    if report.certified {
        lines.push("CERTIFIED: a form with a full etale-exceptional collection and no rational points exists".to_string());
        for s in &report.statements {
            lines.push(format!("  - {s}"));
        }
    } else {
        lines.push(format!(
            "no certificate: {}",
            report.reason.as_deref().unwrap_or("unspecified")
        ));
    }
    lines.push(format!("Zhe: {}", group_invariants_human(&zhe_group)));
    let structured = json!({
        "schema": "aritoric.certificate.v1",
        "certified": report.certified,
        "statements": report.statements,
        "reason": report.reason,
        "zhe": group_invariants_json(&zhe_group),
        "descent_all_vanished": report.descent.as_ref().map(|d| d.all_vanished),
    });
    Ok(Outcome { human: lines.join("\n"), structured, passed: report.certified })
}

fn cmd_coh(fan_path: &Path, coeffs: &[i64]) -> Result<Outcome, CliError> {
    let (fan, _) = load_fan(fan_path)?;
    if coeffs.len() != fan.rays.len() {
        return Err(CliError::Input(format!(
            "expected {} coefficients (one per ray), got {}",
            fan.rays.len(),
            coeffs.len()
        )));
    }
    let d = TDivisor::from_i64(&fan, coeffs);
    let dims = cohomology(&fan, &d)?;
    let human = format!(
        "h^i = {:?}, euler characteristic {}",
        dims.dims,
        dims.euler_char()
    );
    let structured = json!({
        "schema": "aritoric.coh.v1",
        "coeffs": coeffs,
        "dims": dims.dims,
        "euler_char": dims.euler_char().to_string(),
    });
    Ok(Outcome { human, structured, passed: true })
}

fn cmd_ext(
    fan_path: &Path,
    collection_path: &Path,
    from: &str,
    to: &str,
) -> Result<Outcome, CliError> {
    let (fan, fan_text) = load_fan(fan_path)?;
    let collection = read_collection(&read_file(collection_path)?, &fan, &fan_text)?;
    let find = |label: &str| {
        collection
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CliError::Input(format!("no object labeled '{label}'")))
    };
    let i = find(from)?;
    let j = find(to)?;
    let engine = ExtEngine::new(&fan);
    let dims = engine.ext_dims(&collection.objects[i], &collection.objects[j])?;
    let human = format!("Ext^*({from}, {to}) dims = {:?}", dims.dims);
    let structured = json!({
        "schema": "aritoric.ext.v1",
        "from": from,
        "to": to,
        "dims": dims.dims,
    });
    Ok(Outcome { human, structured, passed: true })
}

fn cmd_aut(fan_path: &Path) -> Result<Outcome, CliError> {
    let (fan, _) = load_fan(fan_path)?;
    let auts = fan_aut(&fan)?;
    let census = auts.group.order_census();
    let mut lines = vec![
        format!("automorphism group order: {}", auts.order()),
        format!("element order census: {census:?}"),
    ];
    for (i, (m, perm)) in auts.matrices.iter().zip(&auts.ray_permutations).enumerate() {
        let rows: Vec<String> = (0..fan.rank)
            .map(|r| {
                let entries: Vec<String> =
                    (0..fan.rank).map(|c| m.at(r, c).to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        lines.push(format!("aut {i}: matrix {} ray permutation {perm:?}", rows.join(" ")));
    }
    let structured = json!({
        "schema": "aritoric.aut.v1",
        "order": auts.order(),
        "order_census": census.iter().map(|(k, v)| json!({"order": k, "count": v})).collect::<Vec<_>>(),
        "automorphisms": auts.matrices.iter().zip(&auts.ray_permutations).map(|(m, perm)| json!({
            "matrix": (0..fan.rank).map(|r| (0..fan.rank).map(|c| m.at(r, c).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "ray_permutation": perm,
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { human: lines.join("\n"), structured, passed: true })
}
