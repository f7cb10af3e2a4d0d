use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use legendrian::augmentation::{euler_characteristic, homology_dims, linearize, lch_report};
use legendrian::cobordism::{
    compile_script_with, end_dgas, filling_dim_check, les_euler_check, relative_homology_dims, verify_tb_relation,
    Script,
};
use legendrian::dga::{compute_dga_with_budget, graded_chord_signature, verify_d_squared, DEFAULT_BUDGET};
use legendrian::grid::{parse_grid, rotation_number, thurston_bennequin};
use legendrian::lagrangian::{ng_resolve, tb_signed_chord_sum};
use legendrian::report::Verdict;
use legendrian::spin::{spin_times, tori_pipeline_with, InvariantRecord};
use legendrian::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "lch", version, about = "Legendrian knot invariants and cobordism checks")]
struct Cli {
    /// Grading offset between surface homology and contact cohomology.
    #[arg(long, global = true, default_value_t = 0, allow_negative_numbers = true)]
    sigma: i64,
    /// Node budget for the disk search.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// tb (two ways), rotation number and chord counts of a grid.
    Invariants { grid: PathBuf },
    /// Augmentations and linearized homology of a grid.
    Lch { grid: PathBuf },
    /// Compile and verify a cobordism script.
    Cobordism { script: PathBuf },
    /// Spin an invariant record or run the torus pipeline.
    Spin {
        /// Bottom and top indices: T(2, 2j+1) and T(2, 2k+1).
        #[arg(long, num_args = 2, value_names = ["J", "K"], conflicts_with = "record")]
        tori: Option<Vec<usize>>,
        #[arg(long)]
        record: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
}

/// A finished run: report plus overall verdict.
struct Outcome {
    report: Value,
    verdict: Verdict,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

fn overall(verdicts: &[Verdict]) -> Verdict {
    if verdicts.contains(&Verdict::Fail) {
        Verdict::Fail
    } else if verdicts.iter().any(|&v| v != Verdict::Pass) {
        Verdict::Conditional
    } else {
        Verdict::Pass
    }
}

fn invariants(path: &Path, budget: u64) -> Result<Outcome> {
    let d = parse_grid(&read(path)?)?;
    let l = ng_resolve(&d);
    let dga = compute_dga_with_budget(&l, budget)?;
    let tb_grid = thurston_bennequin(&d)?;
    let tb_chords = tb_signed_chord_sum(&l);
    let verdict = Verdict::from_bool(tb_grid == tb_chords);
    Ok(Outcome {
        report: json!({
            "command": "invariants",
            "grid": d,
            "tb": {"front": tb_grid, "chords": tb_chords, "graded_signature": graded_chord_signature(&dga)},
            "rotation": rotation_number(&d),
            "crossings": d.crossings().len(),
            "generators": dga.generators.len(),
            "modulus": dga.modulus,
            "verdict": verdict,
        }),
        verdict,
    })
}

fn lch(path: &Path, budget: u64) -> Result<Outcome> {
    let d = parse_grid(&read(path)?)?;
    let tb = thurston_bennequin(&d)?;
    let dga = compute_dga_with_budget(&ng_resolve(&d), budget)?;
    let d2 = verify_d_squared(&dga);
    let (augs, rep) = lch_report(&dga)?;
    let mut euler = Vec::with_capacity(augs.len());
    for e in &augs {
        euler.push(euler_characteristic(&homology_dims(&linearize(&dga, e)?)));
    }
    let euler_ok = euler.iter().all(|&x| x == tb);
    let verdict = Verdict::from_bool(d2.ok && euler_ok);
    Ok(Outcome {
        report: json!({
            "command": "lch",
            "tb": tb,
            "dga": dga.to_value(),
            "d_squared": d2,
            "augmentations": rep.augmentations,
            "supports": augs.iter().map(|e| e.support(&dga)).collect::<Vec<_>>(),
            "poincare": rep.poincare,
            "euler": {"values": euler, "equals_tb": euler_ok},
            "verdict": verdict,
        }),
        verdict,
    })
}

fn cobordism(path: &Path, sigma: i64, budget: u64) -> Result<Outcome> {
    let script = Script::from_json(&read(path)?)?;
    let r = match compile_script_with(&script, budget) {
        Ok(r) => r,
        Err(Error::AtMove { index, source }) if !matches!(*source, Error::BudgetExceeded { .. }) => {
            return Ok(Outcome {
                report: json!({
                    "command": "cobordism",
                    "verdict": Verdict::Fail,
                    "failed_move": index,
                    "error": source.to_string(),
                }),
                verdict: Verdict::Fail,
            });
        }
        Err(e) => return Err(e),
    };
    let (dga_b, dga_t) = end_dgas(&r, budget)?;
    let tb_b = if r.is_filling() { 0 } else { r.bottom_front.thurston_bennequin()? };
    let tb = verify_tb_relation(&r, tb_b, r.top.thurston_bennequin()?);
    let les = les_euler_check(&r, &dga_b, &dga_t, sigma)?;
    let mut verdicts = vec![tb.verdict, les.verdict];
    let mut report = json!({
        "command": "cobordism",
        "record": r.to_value(),
        "euler_char": r.euler_char,
        "relative_homology": relative_homology_dims(&r),
        "tb_relation": tb,
        "les_euler": les,
    });
    if r.is_filling() {
        let f = filling_dim_check(&r, &dga_t, sigma)?;
        verdicts.push(f.verdict);
        report["filling_dims"] = serde_json::to_value(&f).expect("report");
    }
    let verdict = overall(&verdicts);
    report["verdict"] = json!(verdict);
    Ok(Outcome { report, verdict })
}

fn spin(tori: Option<Vec<usize>>, record: Option<PathBuf>, m: usize, budget: u64) -> Result<Outcome> {
    match (tori, record) {
        (Some(t), None) => {
            let p = tori_pipeline_with(t[0], t[1], m, budget).map_err(|e| match e {
                Error::InvalidArgument(msg) => {
                    Error::InvalidArgument(format!("{msg}; usage: lch spin --tori J K --m M with K > J >= 1, M >= 1"))
                }
                e => e,
            })?;
            let verdict = p.verdict;
            let mut report = serde_json::to_value(&p).expect("report");
            report["command"] = json!("spin");
            Ok(Outcome { report, verdict })
        }
        (None, Some(path)) => {
            let r = InvariantRecord::from_json(&read(&path)?)?;
            let s = spin_times(&r, m);
            s.validate()?;
            Ok(Outcome {
                report: json!({"command": "spin", "input": r, "m": m, "record": s, "verdict": Verdict::Pass}),
                verdict: Verdict::Pass,
            })
        }
        _ => Err(Error::InvalidArgument("spin needs exactly one of --tori J K or --record FILE".into())),
    }
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || x.as_array().is_some_and(|a| a.iter().any(|y| y.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    text(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {x}\n"));
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                out.push_str(&format!("{pad}-\n"));
                text(x, indent + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{x}\n")),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 3,
        Error::AtMove { source, .. } => exit_code(source),
        Error::NotContractible(_) | Error::NotUnknot(_) | Error::IllegalMove(_) | Error::IllegalGridMove(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.budget == 0 {
        eprintln!("error: --budget must be positive");
        return ExitCode::from(2);
    }
    if cli.jobs > 0 {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    let result = match cli.command {
        Command::Invariants { grid } => invariants(&grid, cli.budget),
        Command::Lch { grid } => lch(&grid, cli.budget),
        Command::Cobordism { script } => cobordism(&script, cli.sigma, cli.budget),
        Command::Spin { tori, record, m } => spin(tori, record, m, cli.budget),
    };
    match result {
        Ok(Outcome { mut report, verdict }) => {
            report["config"] = json!({"sigma": cli.sigma, "budget": cli.budget});
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&report).expect("serializable report"),
                Format::Text => {
                    let mut s = String::new();
                    text(&report, 0, &mut s);
                    s.trim_end().to_string()
                }
            };
            let mut out = std::io::stdout().lock();
            if writeln!(out, "{body}").is_err() {
                return ExitCode::from(2);
            }
            match verdict {
                Verdict::Fail => ExitCode::from(1),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
