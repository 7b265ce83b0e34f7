//! `modcond`: enumerate suborbits, count, condense and verify scenarios.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use modcond::condense::{
    build_condensed_space, condensed_action_from, eigenspace_table, idempotent_split,
    split_identities_hold, CondenseError,
};
use modcond::endo::{self, CountConfig, DoubleCosetData, EndoError};
use modcond::oracle::{full_pipeline_check, OracleError, PipelineInputs};
use modcond::orbits::{load_db, save_db, verify_disjoint, EngineConfig, OrbitDB, OrbitError};
use modcond::scenario::{Scenario, ScenarioError, Setup, Side};

const EXIT_FAIL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "modcond",
    version,
    about = "Condensation of induced modules via suborbit enumeration"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Bundled scenario name or path to a scenario file.
    #[arg(long)]
    scenario: String,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for counting and condensation.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Also write the report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate suborbits and save the orbit database.
    Enumerate {
        #[command(flatten)]
        common: Common,
        /// Side to enumerate; both when omitted.
        #[arg(long)]
        side: Option<Side>,
        #[arg(long)]
        db: PathBuf,
        /// Budget of random draws during discovery.
        #[arg(long)]
        max_draws: Option<u64>,
    },
    /// Orbit counting tables and intersection numbers.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        db: PathBuf,
        /// Comma-separated suborbit indices (1-based); all when omitted.
        #[arg(long, value_delimiter = ',')]
        elements: Vec<usize>,
    },
    /// Condensed operators and the split of one of them.
    Condense {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        db: PathBuf,
        #[arg(long, value_delimiter = ',')]
        elements: Vec<usize>,
        /// Coefficient module; the first one in the scenario when omitted.
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        split_element: Option<usize>,
        /// Directory for the operator files; `<db>/operators/<module>` by default.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the pipeline with the explicit oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Use saved databases instead of enumerating in memory.
        #[arg(long)]
        db: Option<PathBuf>,
        /// Module to check; all when omitted.
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        split_element: Option<usize>,
    },
}

enum Outcome {
    Ok,
    Fail,
    Resource,
}

struct Ctx {
    setup: Setup,
    seed: u64,
    common: Common,
    report: String,
}

impl Ctx {
    fn new(common: &Common) -> Result<Ctx> {
        let scenario = Scenario::load(&common.scenario)?;
        let setup = Setup::new(scenario)?;
        let seed = common.seed.unwrap_or(setup.scenario.seed);
        let mut report = String::new();
        let _ = writeln!(
            report,
            "# scenario {} digest {} seed {seed}",
            setup.scenario.name, setup.digest
        );
        Ok(Ctx {
            setup,
            seed,
            common: common.clone(),
            report,
        })
    }

    fn engine_config(&self, max_draws: Option<u64>) -> Result<EngineConfig> {
        let mut cfg = EngineConfig::default();
        if let Ok(mb) = std::env::var("MODCOND_MEM_MB") {
            let mb: u64 = mb.parse().context("MODCOND_MEM_MB must be an integer")?;
            cfg.mem_limit = Some(mb * 1024 * 1024);
        }
        if let Some(m) = max_draws {
            cfg.max_draws = m;
        }
        Ok(cfg)
    }

    fn count_config(&self) -> CountConfig {
        CountConfig {
            seed: self.seed,
            workers: self.common.workers.max(1),
            ..CountConfig::default()
        }
    }

    fn load(&self, db: &Path, side: Side) -> Result<OrbitDB> {
        let eng = self.setup.engine(side, self.engine_config(None)?)?;
        let loaded = load_db(eng, db, side.label())?;
        if !loaded.is_complete() {
            bail!(
                "the {side} database in {} is incomplete; rerun `modcond enumerate --side {side}`",
                db.display()
            );
        }
        Ok(loaded)
    }

    fn enumerate_in_memory(&self, side: Side) -> Result<OrbitDB> {
        let eng = self.setup.engine(side, self.engine_config(None)?)?;
        let mut db = OrbitDB::new(eng, side.label(), self.seed);
        db.discover()?;
        if !db.is_complete() {
            return Err(OrbitError::Resource(format!("side {side}: draw budget exhausted")).into());
        }
        Ok(db)
    }

    fn indices(&self, elements: &[usize], r: usize) -> Result<Vec<usize>> {
        if elements.is_empty() {
            return Ok((0..r).collect());
        }
        elements
            .iter()
            .map(|&i| {
                if i == 0 || i > r {
                    bail!("element {i} out of range 1..={r}");
                }
                Ok(i - 1)
            })
            .collect()
    }

    fn finish(&self) -> Result<()> {
        print!("{}", self.report);
        if let Some(path) = &self.common.report {
            fs::write(path, &self.report).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn enumerate(
    ctx: &mut Ctx,
    side: Option<Side>,
    db_dir: &Path,
    max_draws: Option<u64>,
) -> Result<Outcome> {
    let sides = side.map_or(vec![Side::H, Side::U], |s| vec![s]);
    let mut outcome = Outcome::Ok;
    for side in sides {
        let eng = ctx.setup.engine(side, ctx.engine_config(max_draws)?)?;
        let mut db = match load_db(eng.clone(), db_dir, side.label()) {
            Ok(db) if db.seed == ctx.seed => {
                let _ = writeln!(
                    ctx.report,
                    "# side {side}: resuming after {} draws",
                    db.draws
                );
                db
            }
            _ => OrbitDB::new(eng, side.label(), ctx.seed),
        };
        let run = db.discover();
        save_db(&db, db_dir)?;
        if let Err(e) = run {
            if matches!(e, OrbitError::Resource(_)) {
                let _ = writeln!(ctx.report, "# side {side}: {e}; partial database saved");
                outcome = Outcome::Resource;
                continue;
            }
            return Err(e.into());
        }
        let st = db.stats();
        let _ = writeln!(
            ctx.report,
            "side {side} suborbits {} draws {}",
            st.suborbits.len(),
            db.draws
        );
        let _ = writeln!(
            ctx.report,
            "{:>4} {:>12} {:>10} {:>10}",
            "j", "length", "stored", "saving"
        );
        for s in &st.suborbits {
            let _ = writeln!(
                ctx.report,
                "{:>4} {:>12} {:>10} {:>10.2}",
                s.index, s.length, s.stored, s.saving
            );
        }
        let _ = writeln!(
            ctx.report,
            "total {} of {} stored {} helper bytes {}",
            st.total_length,
            db.engine().orbit_size,
            st.total_stored,
            st.helper_bytes
        );
        if !st.complete {
            let _ = writeln!(
                ctx.report,
                "# side {side}: draw budget exhausted; rerun with a larger --max-draws to resume"
            );
            outcome = Outcome::Resource;
            continue;
        }
        let d = verify_disjoint(&db);
        if !d.ok() {
            let _ = writeln!(ctx.report, "FAIL disjointness: {d:?}");
            outcome = Outcome::Fail;
        }
    }
    ctx.finish()?;
    Ok(outcome)
}

fn count(ctx: &mut Ctx, db_dir: &Path, elements: &[usize]) -> Result<Outcome> {
    let h = ctx.load(db_dir, Side::H)?;
    let u = ctx.load(db_dir, Side::U)?;
    let cfg = ctx.count_config();
    let dc = DoubleCosetData::new(&u, endo::POINT_BOUND as u64)?;
    let lengths = h.lengths();
    let mut outcome = Outcome::Ok;
    for i in ctx.indices(elements, lengths.len())? {
        let t = endo::orbit_counting(&h, &u, i, Some(&dc), cfg)?;
        let _ = writeln!(ctx.report, "# counting table of A{} (i,j,k[,l],c)", i + 1);
        ctx.report.push_str(&t.to_csv());
        if !(t.row_sums_ok() && t.dichotomy_ok()) {
            let _ = writeln!(ctx.report, "FAIL counting dichotomy for A{}", i + 1);
            outcome = Outcome::Fail;
        }
        let p = endo::intersection_matrix(&endo::orbit_counting(&h, &h, i, None, cfg)?, &lengths)?;
        let _ = writeln!(ctx.report, "# intersection numbers of A{} (i,j,k,p)", i + 1);
        ctx.report.push_str(&endo::intersection_csv(i, &p));
    }
    ctx.finish()?;
    Ok(outcome)
}

fn condense(
    ctx: &mut Ctx,
    db_dir: &Path,
    elements: &[usize],
    module: Option<&str>,
    split_element: Option<usize>,
    out: Option<&Path>,
) -> Result<Outcome> {
    let h = ctx.load(db_dir, Side::H)?;
    let u = ctx.load(db_dir, Side::U)?;
    let cfg = ctx.count_config();
    let name = match module {
        Some(m) => m.to_string(),
        None => ctx
            .setup
            .modules
            .first()
            .map(|m| m.0.clone())
            .context("scenario has no modules")?,
    };
    let v = ctx.setup.module(&name)?;
    let cs = build_condensed_space(v, &u)?;
    let r = h.suborbits().len();
    let split_idx = match split_element.or(ctx.setup.scenario.split_element) {
        Some(i) => ctx.indices(&[i], r)?[0],
        None => endo::default_split_element(&h),
    };
    let mut wanted = ctx.indices(elements, r)?;
    if !wanted.contains(&split_idx) {
        wanted.push(split_idx);
    }
    let dir = out.map_or_else(|| db_dir.join("operators").join(&name), Path::to_path_buf);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let _ = writeln!(
        ctx.report,
        "module {name} D {} blocks {:?}",
        cs.dim,
        cs.block_dims()
    );
    let mut split_op = None;
    for i in wanted {
        let tr = endo::translates(&h, &u, i, cfg)?;
        let op = condensed_action_from(&tr, &cs)?;
        let path = dir.join(format!("A{}.txt", i + 1));
        fs::write(&path, op.to_text()).with_context(|| format!("writing {}", path.display()))?;
        let _ = writeln!(ctx.report, "wrote {}", path.display());
        if i == split_idx {
            split_op = Some(op);
        }
    }
    let op = split_op.context("split element was not computed")?;
    let split = idempotent_split(&op.matrix)?;
    ctx.report.push_str(&eigenspace_table(&op, &split));
    let mut outcome = Outcome::Ok;
    if !split_identities_hold(&op.matrix, &split) {
        let _ = writeln!(ctx.report, "FAIL idempotent identities");
        outcome = Outcome::Fail;
    }
    let mut seen = std::collections::HashSet::new();
    if split
        .iter()
        .any(|c| c.eigenvalue().is_some_and(|l| !seen.insert(l)) || c.factor.degree() != Some(1))
    {
        let _ = writeln!(
            ctx.report,
            "# note: eigenvalues of {} do not separate all components",
            op.label
        );
    }
    ctx.finish()?;
    Ok(outcome)
}

fn verify(
    ctx: &mut Ctx,
    db_dir: Option<&Path>,
    module: Option<&str>,
    split_element: Option<usize>,
) -> Result<Outcome> {
    let (h, u) = match db_dir {
        Some(d) => (ctx.load(d, Side::H)?, ctx.load(d, Side::U)?),
        None => (
            ctx.enumerate_in_memory(Side::H)?,
            ctx.enumerate_in_memory(Side::U)?,
        ),
    };
    let names: Vec<String> = match module {
        Some(m) => {
            ctx.setup.module(m)?;
            vec![m.to_string()]
        }
        None => ctx.setup.modules.iter().map(|m| m.0.clone()).collect(),
    };
    let mut outcome = Outcome::Ok;
    for name in names {
        let rep = full_pipeline_check(&PipelineInputs {
            setup: &ctx.setup,
            db_h: &h,
            db_u: &u,
            module: &name,
            split_element: split_element.or(ctx.setup.scenario.split_element),
            count: ctx.count_config(),
        })?;
        let _ = writeln!(ctx.report, "# module {name}");
        ctx.report.push_str(&rep.to_text());
        if !rep.passed() {
            outcome = Outcome::Fail;
        }
    }
    let _ = writeln!(
        ctx.report,
        "{}",
        if matches!(outcome, Outcome::Ok) {
            "PASS"
        } else {
            "FAIL"
        }
    );
    ctx.finish()?;
    Ok(outcome)
}

fn orbit_resource(e: &OrbitError) -> bool {
    matches!(e, OrbitError::Resource(_))
}

fn endo_resource(e: &EndoError) -> bool {
    match e {
        EndoError::TooLarge { .. } => true,
        EndoError::Orbit(o) => orbit_resource(o),
        _ => false,
    }
}

fn condense_resource(e: &CondenseError) -> bool {
    match e {
        CondenseError::Endo(x) => endo_resource(x),
        _ => false,
    }
}

/// Exit code for an error: resource bounds give 3, everything else 2.
fn exit_code(err: &anyhow::Error) -> u8 {
    let resource = if let Some(e) = err.downcast_ref::<OrbitError>() {
        orbit_resource(e)
    } else if let Some(e) = err.downcast_ref::<ScenarioError>() {
        matches!(e, ScenarioError::Orbit(o) if orbit_resource(o))
    } else if let Some(e) = err.downcast_ref::<EndoError>() {
        endo_resource(e)
    } else if let Some(e) = err.downcast_ref::<CondenseError>() {
        condense_resource(e)
    } else if let Some(e) = err.downcast_ref::<OracleError>() {
        match e {
            OracleError::Bound { .. } => true,
            OracleError::Orbit(o) => orbit_resource(o),
            OracleError::Endo(x) => endo_resource(x),
            OracleError::Condense(x) => condense_resource(x),
            _ => false,
        }
    } else {
        false
    };
    if resource {
        EXIT_RESOURCE
    } else {
        EXIT_INVALID
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.cmd {
        Command::Enumerate {
            common,
            side,
            db,
            max_draws,
        } => enumerate(&mut Ctx::new(&common)?, side, &db, max_draws),
        Command::Count {
            common,
            db,
            elements,
        } => count(&mut Ctx::new(&common)?, &db, &elements),
        Command::Condense {
            common,
            db,
            elements,
            module,
            split_element,
            out,
        } => condense(
            &mut Ctx::new(&common)?,
            &db,
            &elements,
            module.as_deref(),
            split_element,
            out.as_deref(),
        ),
        Command::Verify {
            common,
            db,
            module,
            split_element,
        } => verify(
            &mut Ctx::new(&common)?,
            db.as_deref(),
            module.as_deref(),
            split_element,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAIL),
        Ok(Outcome::Resource) => ExitCode::from(EXIT_RESOURCE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
