//! `pctl-reduce`: compile counter machines to PCTL, build witness chains,
//! model check, translate and lint.
//!
//! Exit codes: 0 pass/SAT, 1 fail/UNSAT, 2 usage or I/O, 3 invariant violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pctl_reduce::minsky::{
    run_with_period_detection, two_counter_to_product, Machine, Partition, Strategy, SyncProduct,
};
use pctl_reduce::pctl::{
    as_always, fragment_lint, parse_formula, print_formula, Checker, Formula, MarkovChain,
    StateFormula,
};
use pctl_reduce::reduction::{
    build_Psi_product, build_psi_one_counter, build_psi_parameterized, recurrence_extension,
    CompileOptions, CompiledFormula,
};
use pctl_reduce::verify::{
    verify_one_counter, verify_param, verify_product, VerifyOptions, NO_FINITE_WITNESS,
};
use pctl_reduce::witness::{
    model_one_counter, model_param, model_product, ParamLayout, ResidualRule, Witness, WitnessError,
};
use pctl_reduce::{default_constants, ExecMode, Rat};

#[derive(Parser)]
#[command(
    name = "pctl-reduce",
    version,
    about = "Counter machines to PCTL, with witness chains"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a formula; writes `<out>` and a `<out>.json` sidecar.
    Compile {
        family: FamilyArg,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build a witness chain as chain JSON.
    Witness {
        family: FamilyArg,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Model check a formula file at one state of a chain file.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        state: String,
        /// Also print probabilities of `P` subformulae nested at most this
        /// deep in the boolean structure.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long)]
        json: bool,
    },
    /// Compile, build the witness, check it and report.
    Verify {
        family: FamilyArg,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        json: bool,
    },
    /// Translate a two-counter machine into a synchronized product.
    Translate {
        kind: TranslateKind,
        #[arg(long)]
        machine: PathBuf,
        /// Directory receiving m1.mm, m2.mm, extended.mm and partition.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Check that a formula stays in the X / bounded-F fragment.
    Lint {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Re-emit a chain file as DOT or canonical JSON.
    Export {
        format: ExportFormat,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Param,
    OneCounter,
    Product,
}

#[derive(Clone, Copy, ValueEnum)]
enum TranslateKind {
    TwoCounter,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Closed,
    Printed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResidualArg {
    ParentNormalized,
    Printed,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    machine: Option<PathBuf>,
    #[arg(long)]
    m1: Option<PathBuf>,
    #[arg(long)]
    m2: Option<PathBuf>,
    #[arg(long)]
    partition: Option<PathBuf>,
    /// `first` or comma-separated choice indices.
    #[arg(long, default_value = "first")]
    strategy: String,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
    /// Add the recurrence conjunct for label 1 (products only).
    #[arg(long)]
    recurrence: bool,
    /// Emit the literal formula variants (κ₂ Interval bound, ¬Zero-scoped step, unguarded LTrans, plain F recurrence).
    #[arg(long)]
    strict_paper: bool,
    #[arg(long, value_enum, default_value = "closed")]
    layout: LayoutArg,
    #[arg(long, value_enum, default_value = "parent-normalized")]
    residual: ResidualArg,
    #[arg(long)]
    sequential: bool,
}

struct Fail {
    code: u8,
    err: anyhow::Error,
}

type Res = Result<u8, Fail>;

fn usage(err: impl Into<anyhow::Error>) -> Fail {
    Fail {
        code: 2,
        err: err.into(),
    }
}

fn witness_fail(err: WitnessError) -> Fail {
    let code = match err {
        WitnessError::Aperiodic | WitnessError::NotOneCounter(_) => 1,
        _ => 3,
    };
    Fail {
        code,
        err: err.into(),
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn machine(path: &Path) -> Result<Machine, Fail> {
    Machine::parse(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

fn need<'a, T>(x: &'a Option<T>, flag: &str) -> Result<&'a T, Fail> {
    x.as_ref().ok_or_else(|| usage(anyhow!("missing --{flag}")))
}

impl Inputs {
    fn options(&self) -> CompileOptions {
        if self.strict_paper {
            CompileOptions::strict_paper()
        } else {
            CompileOptions::default()
        }
    }

    fn strategy(&self) -> Result<Strategy, Fail> {
        self.strategy
            .parse::<Strategy>()
            .map_err(|e| usage(anyhow!("--strategy: {e}")))
    }

    fn layout(&self) -> ParamLayout {
        match self.layout {
            LayoutArg::Closed => ParamLayout::Closed,
            LayoutArg::Printed => ParamLayout::Printed,
        }
    }

    fn residual(&self) -> ResidualRule {
        match self.residual {
            ResidualArg::ParentNormalized => ResidualRule::ParentNormalized,
            ResidualArg::Printed => ResidualRule::Printed,
        }
    }

    fn product(&self) -> Result<SyncProduct, Fail> {
        let m1 = machine(need(&self.m1, "m1")?)?;
        let m2 = machine(need(&self.m2, "m2")?)?;
        let part =
            Partition::from_json(&read(need(&self.partition, "partition")?)?).map_err(usage)?;
        SyncProduct::new(m1, m2, part).map_err(usage)
    }

    fn verify_options(&self) -> Result<VerifyOptions, Fail> {
        Ok(VerifyOptions {
            compile: self.options(),
            layout: self.layout(),
            residual: self.residual(),
            strategy: self.strategy()?,
            max_steps: self.max_steps,
            recurrence: self.recurrence,
            mode: if self.sequential {
                ExecMode::Sequential
            } else {
                ExecMode::Parallel
            },
            ..VerifyOptions::default()
        })
    }
}

fn compile(family: FamilyArg, inputs: &Inputs) -> Result<CompiledFormula, Fail> {
    let c = default_constants();
    let opts = inputs.options();
    let f = match family {
        FamilyArg::Param => build_psi_parameterized(&c, *need(&inputs.n, "n")?, opts).0,
        FamilyArg::OneCounter => {
            build_psi_one_counter(&c, &machine(need(&inputs.machine, "machine")?)?, opts)
        }
        FamilyArg::Product => {
            let f = build_Psi_product(&c, &inputs.product()?, opts);
            if inputs.recurrence {
                recurrence_extension(&f)
            } else {
                f
            }
        }
    };
    Ok(f)
}

fn cmd_compile(family: FamilyArg, inputs: &Inputs, out: Option<&Path>, json: bool) -> Res {
    let f = compile(family, inputs)?;
    let text = format!("{}\n", f.text());
    let sidecar = serde_json::to_string_pretty(&f.sidecar()).expect("sidecar serializes");
    match out {
        Some(p) => {
            write(p, &text)?;
            let mut side = p.as_os_str().to_owned();
            side.push(".json");
            write(Path::new(&side), &format!("{sidecar}\n"))?;
        }
        None if json => {
            let both = serde_json::json!({ "formula": f.text(), "sidecar": f.sidecar() });
            println!(
                "{}",
                serde_json::to_string_pretty(&both).expect("serializes")
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

fn build_witness(family: FamilyArg, inputs: &Inputs) -> Result<Witness, Fail> {
    let c = default_constants();
    match family {
        FamilyArg::Param => {
            model_param(&c, *need(&inputs.n, "n")?, inputs.layout()).map_err(witness_fail)
        }
        FamilyArg::OneCounter => {
            let m = machine(need(&inputs.machine, "machine")?)?;
            let run = run_with_period_detection(&m, inputs.max_steps, &inputs.strategy()?);
            model_one_counter(&c, &m, &run, inputs.residual()).map_err(witness_fail)
        }
        FamilyArg::Product => {
            let p = inputs.product()?;
            let run = run_with_period_detection(&p, inputs.max_steps, &inputs.strategy()?);
            model_product(&c, &p, &run, inputs.residual()).map_err(witness_fail)
        }
    }
}

fn cmd_witness(family: FamilyArg, inputs: &Inputs, out: Option<&Path>) -> Res {
    let w = build_witness(family, inputs)?;
    emit(out, &format!("{}\n", w.chain.to_json()))?;
    eprintln!("{} states, start {}", w.chain.len(), w.start_id());
    Ok(0)
}

fn load_chain(path: &Path) -> Result<MarkovChain, Fail> {
    MarkovChain::from_json(&read(path)?)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(usage)
}

fn load_formula(path: &Path) -> Result<Formula, Fail> {
    parse_formula(read(path)?.trim())
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

/// `P` nodes reachable through at most `depth` boolean connectives.
fn prob_nodes(f: &Formula, depth: usize, out: &mut Vec<Formula>) {
    match &**f {
        StateFormula::Prob { .. } => out.push(f.clone()),
        StateFormula::Not(_)
        | StateFormula::And(..)
        | StateFormula::Or(..)
        | StateFormula::Implies(..)
            if depth > 0 =>
        {
            for c in f.children() {
                prob_nodes(c, depth - 1, out);
            }
        }
        _ => {}
    }
}

fn cmd_check(model: &Path, formula: &Path, state: &str, depth: usize, json: bool) -> Res {
    let mc = load_chain(model)?;
    let f = load_formula(formula)?;
    let s = mc.index_of(state).map_err(usage)?;
    let mut ck = Checker::new(&mc);
    let sat = ck.holds(&f, s);
    let mut table = Vec::new();
    if depth > 0 {
        let mut nodes = Vec::new();
        prob_nodes(&f, depth, &mut nodes);
        for node in nodes {
            if let StateFormula::Prob { path, .. } = &*node {
                let p = ck.path_probabilities(path)[s].clone();
                // `G f` is stored as `P=0 [ F !f ]`; report the probability of `G f`.
                let p = if as_always(&node).is_some() {
                    Rat::one() - p
                } else {
                    p
                };
                table.push((print_formula(&node), p));
            }
        }
    }
    if json {
        let rows: Vec<_> = table
            .iter()
            .map(|(f, p)| serde_json::json!({ "formula": f, "probability": p }))
            .collect();
        let v = serde_json::json!({ "state": state, "sat": sat, "probabilities": rows });
        println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
    } else {
        println!("{}", if sat { "SAT" } else { "UNSAT" });
        for (f, p) in &table {
            println!("  {p}  {f}");
        }
    }
    Ok(if sat { 0 } else { 1 })
}

fn cmd_verify(family: FamilyArg, inputs: &Inputs, json: bool) -> Res {
    let c = default_constants();
    let opts = inputs.verify_options()?;
    let rep = match family {
        FamilyArg::Param => verify_param(&c, *need(&inputs.n, "n")?, &opts),
        FamilyArg::OneCounter => {
            verify_one_counter(&c, &machine(need(&inputs.machine, "machine")?)?, &opts)
        }
        FamilyArg::Product => verify_product(&c, &inputs.product()?, &opts),
    }
    .map_err(witness_fail)?;
    if json {
        let mut v = serde_json::to_value(&rep).expect("report serializes");
        v["pass"] = rep.pass().into();
        println!("{}", serde_json::to_string_pretty(&v).expect("serializes"));
    } else {
        print!("{}", rep.summary());
    }
    if rep.note.as_deref() == Some(NO_FINITE_WITNESS) {
        return Ok(1);
    }
    Ok(if rep.pass() { 0 } else { 1 })
}

fn cmd_translate(path: &Path, out: Option<&Path>, json: bool) -> Res {
    let m = machine(path)?;
    let t = two_counter_to_product(&m).map_err(usage)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(usage)?;
        write(&dir.join("extended.mm"), &t.extended.to_string())?;
        write(&dir.join("m1.mm"), &t.product.machine(1).to_string())?;
        write(&dir.join("m2.mm"), &t.product.machine(2).to_string())?;
        write(
            &dir.join("partition.json"),
            &format!("{}\n", t.product.partition().to_json()),
        )?;
    }
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&t).expect("translation serializes")
        );
    } else {
        println!(
            "source {} instructions, extended {}, product machines {} each",
            t.source.len(),
            t.extended.len(),
            t.product.len()
        );
        println!("label encoding: {}", t.encoding);
        if out.is_none() {
            print!(
                "# m1\n{}# m2\n{}",
                t.product.machine(1),
                t.product.machine(2)
            );
            println!("# partition\n{}", t.product.partition().to_json());
        }
    }
    Ok(0)
}

fn cmd_lint(path: &Path, json: bool) -> Res {
    let rep = fragment_lint(&load_formula(path)?);
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&rep).expect("report serializes")
        );
    } else {
        print!("{rep}");
    }
    Ok(if rep.pass { 0 } else { 1 })
}

fn cmd_export(format: ExportFormat, model: &Path, out: Option<&Path>) -> Res {
    let mc = load_chain(model)?;
    let text = match format {
        ExportFormat::Dot => mc.to_dot(),
        ExportFormat::Json => format!("{}\n", mc.to_json()),
    };
    emit(out, &text)?;
    Ok(0)
}

fn run(cli: Cli) -> Res {
    match &cli.cmd {
        Cmd::Compile {
            family,
            inputs,
            out,
            json,
        } => cmd_compile(*family, inputs, out.as_deref(), *json),
        Cmd::Witness {
            family,
            inputs,
            out,
        } => cmd_witness(*family, inputs, out.as_deref()),
        Cmd::Check {
            model,
            formula,
            state,
            depth,
            json,
        } => cmd_check(model, formula, state, *depth, *json),
        Cmd::Verify {
            family,
            inputs,
            json,
        } => cmd_verify(*family, inputs, *json),
        Cmd::Translate {
            kind: TranslateKind::TwoCounter,
            machine,
            out,
            json,
        } => cmd_translate(machine, out.as_deref(), *json),
        Cmd::Lint { formula, json } => cmd_lint(formula, *json),
        Cmd::Export { format, model, out } => cmd_export(*format, model, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
