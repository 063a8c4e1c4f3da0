use std::fs;
use std::path::Path;

use fractal_calc::calculus::{cumulative_integral, derivative_grid, GridFunction};
use fractal_calc::cantor::{generate_levels, CantorSpec};
use fractal_calc::definition::{System, SystemDefinition};
use fractal_calc::expr::Expr;
use fractal_calc::fde::{solve_classical, solve_first_order, solve_second_order, PlanarField, Scheme, Trajectory};
use fractal_calc::lyapunov::{
    check_assumptions, classify_stability, verify_forced_boundedness, verify_unforced_stability, AssumptionGrids,
    LyapunovFunction, StabilityConfig, TheoremConfig,
};
use fractal_calc::models;
use fractal_calc::staircase::{build_staircase, default_alpha_grid, gamma_dimension, StaircaseTable};
use fractal_calc::Error;
use serde_json::{json, Value};

use crate::output::{emit, fmt_sig, pretty_json, Cell, Table};
use crate::{AlphaArg, Command, Common, DemoModel, Format, SystemArgs};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) | Error::BlowUp { .. } | Error::Estimation { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Levels of the mass ratio used by `--alpha auto`.
const AUTO_LEVELS: (u32, u32) = (8, 16);

struct Ctx<'a> {
    common: &'a Common,
}

impl Ctx<'_> {
    fn depth(&self, default: u32) -> u32 {
        let depth = self.common.depth.unwrap_or(default);
        match self.common.max_depth {
            Some(cap) if depth > cap => {
                eprintln!("warning: depth {depth} clamped to FRACTAL_CALC_MAX_DEPTH = {cap}");
                cap
            }
            _ => depth,
        }
    }

    fn spec(&self, depth: u32) -> Result<CantorSpec, Failure> {
        Ok(CantorSpec::with_interval(self.common.mu, depth, 0.0, self.common.extent)?)
    }

    fn alpha(&self, spec: &CantorSpec) -> Result<f64, Failure> {
        match self.common.alpha {
            AlphaArg::Value(a) => Ok(a),
            AlphaArg::Auto => {
                let (l1, l2) = AUTO_LEVELS;
                let est = gamma_dimension(
                    spec,
                    spec.interval_length_at(l1),
                    spec.interval_length_at(l2),
                    &default_alpha_grid(),
                )?;
                Ok(est.alpha)
            }
        }
    }

    fn table(&self, default_depth: u32) -> Result<StaircaseTable, Failure> {
        let spec = self.spec(self.depth(default_depth))?;
        let alpha = self.alpha(&spec)?;
        Ok(build_staircase(&spec, alpha, self.common.t0)?)
    }

    fn t_end(&self) -> f64 {
        self.common.t_end.unwrap_or(self.common.extent)
    }

    fn write_table(&self, table: &Table) -> Outcome {
        let text = match self.format() {
            Format::Csv => table.to_csv(),
            Format::Json => pretty_json(&table.to_json()),
        };
        self.write(&text)
    }

    fn format(&self) -> Format {
        self.common.format.unwrap_or(Format::Csv)
    }

    fn write(&self, text: &str) -> Outcome {
        emit(self.common.out.as_deref(), text).map_err(|e| usage(format!("cannot write output: {e}")))
    }
}

pub fn run(common: &Common, command: &Command) -> Outcome {
    let ctx = Ctx { common };
    match command {
        Command::Cantor => cantor(&ctx),
        Command::Staircase => staircase(&ctx),
        Command::Dimension => dimension(&ctx),
        Command::Chi { points } => chi(&ctx, *points),
        Command::Deriv { function } => deriv(&ctx, function),
        Command::Integrate { function } => integrate(&ctx, function),
        Command::Solve(args) => solve(&ctx, args),
        Command::Stability { system, horizon } => stability(&ctx, system, *horizon),
        Command::Demo {
            model,
            z0,
            y0,
            stiffness,
            classical,
        } => demo(&ctx, *model, z0, *y0, *stiffness, *classical),
    }
}

fn cantor(ctx: &Ctx) -> Outcome {
    let spec = ctx.spec(ctx.depth(6))?;
    let mut table = Table::new(&["level", "index", "a", "b"]);
    let levels = generate_levels(&spec);
    let first = if spec.depth() == 0 { 0 } else { 1 };
    for (level, set) in levels.iter().enumerate().skip(first) {
        for (i, iv) in set.intervals().iter().enumerate() {
            table.push(vec![Cell::from(level), Cell::from(i), iv.a.into(), iv.b.into()]);
        }
    }
    ctx.write_table(&table)
}

fn staircase(ctx: &Ctx) -> Outcome {
    let st = ctx.table(8)?;
    let mut table = Table::new(&["t", "s"]);
    for (t, s) in st.breakpoints() {
        table.push(vec![t.into(), s.into()]);
    }
    ctx.write_table(&table)
}

fn dimension(ctx: &Ctx) -> Outcome {
    let spec = ctx.spec(ctx.depth(16))?;
    let fine = spec.depth();
    let coarse = fine / 2;
    let est = gamma_dimension(
        &spec,
        spec.interval_length_at(coarse),
        spec.interval_length_at(fine),
        &default_alpha_grid(),
    )?;
    eprintln!("estimate: alpha = {}", fmt_sig(est.alpha));
    match ctx.format() {
        Format::Json => ctx.write(&pretty_json(&est)),
        Format::Csv => {
            let mut table = Table::new(&["alpha", "ratio"]);
            for &(a, r) in &est.curve {
                table.push(vec![a.into(), r.into()]);
            }
            ctx.write_table(&table)
        }
    }
}

fn chi(ctx: &Ctx, points: usize) -> Outcome {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let st = ctx.table(8)?;
    let (lo, hi) = st.span();
    let mut table = Table::new(&["t", "chi"]);
    for k in 0..points {
        let t = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        table.push(vec![t.into(), st.characteristic(t).into()]);
    }
    ctx.write_table(&table)
}

fn function_of_t_s(src: &str) -> Result<impl Fn(f64, f64) -> f64, Failure> {
    let f = Expr::parse(src)?.bind(&["t", "s"])?;
    Ok(move |t, s| f.eval(&[t, s]))
}

fn deriv(ctx: &Ctx, function: &str) -> Outcome {
    let st = ctx.table(12)?;
    let f = GridFunction::sample(&st, function_of_t_s(function)?);
    let d = derivative_grid(&f)?;
    let mut table = Table::new(&["t", "s", "f", "derivative"]);
    for ((t, v), dv) in f.iter().zip(d.values()) {
        table.push(vec![t.into(), st.eval(t)?.into(), v.into(), (*dv).into()]);
    }
    ctx.write_table(&table)
}

fn integrate(ctx: &Ctx, function: &str) -> Outcome {
    let st = ctx.table(12)?;
    let f = GridFunction::sample(&st, function_of_t_s(function)?);
    let (a, b) = (ctx.common.t0, ctx.t_end());
    if !(a < b) {
        return Err(usage(format!("need t0 < t-end, got [{a}, {b}]")));
    }
    let running = cumulative_integral(&f);
    let mut table = Table::new(&["t", "s", "f", "integral"]);
    let mut base = None;
    for ((t, acc), v) in running.into_iter().zip(f.values()) {
        if t < a || t > b {
            continue;
        }
        let start = *base.get_or_insert(acc);
        table.push(vec![t.into(), st.eval(t)?.into(), (*v).into(), (acc - start).into()]);
    }
    if let Some(last) = table.rows.last() {
        if let Cell::Float(total) = last[3] {
            eprintln!("integral = {}", fmt_sig(total));
        }
    }
    ctx.write_table(&table)
}

fn load_definition(arg: &str) -> Result<SystemDefinition, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(Path::new(arg)).map_err(|e| usage(format!("cannot read system file '{arg}': {e}")))?
    };
    Ok(SystemDefinition::from_json(&text)?)
}

/// Staircase trajectory, or the partial one plus a failure on blow-up.
fn run_trajectory(
    field: &System,
    table: &StaircaseTable,
    (y0, z0): (f64, f64),
    t_end: f64,
    dtau: f64,
) -> (Trajectory, Option<Failure>) {
    let result = match field {
        System::FirstOrder(f) => solve_first_order(&f.0, table, y0, t_end, dtau),
        other => solve_second_order(other, table, y0, z0, t_end, dtau),
    };
    settle(result)
}

fn settle(result: fractal_calc::Result<Trajectory>) -> (Trajectory, Option<Failure>) {
    match result {
        Ok(t) => (t, None),
        Err(Error::BlowUp { tau, partial }) => (
            *partial,
            Some(Failure {
                code: 3,
                message: format!("trajectory blew up at tau = {tau}; partial output written"),
            }),
        ),
        Err(e) => (
            Trajectory {
                samples: Vec::new(),
                meta: fractal_calc::fde::TrajectoryMeta {
                    scheme: Scheme::Rk4,
                    dtau: 0.0,
                    depth: None,
                    alpha: 0.0,
                },
            },
            Some(e.into()),
        ),
    }
}

/// α = 1 solution started at `t0` and read off at physical times `t`.
fn classical_states<F: PlanarField + ?Sized>(
    field: &F,
    t0: f64,
    start: (f64, f64),
    t_end: f64,
    dtau: f64,
) -> Result<Trajectory, Failure> {
    match solve_classical(field, t0, start, t_end, dtau, Scheme::Rk4) {
        Ok(t) => Ok(t),
        Err(Error::BlowUp { partial, .. }) => Ok(*partial),
        Err(e) => Err(e.into()),
    }
}

fn classical_at(reference: &Trajectory, t0: f64, t: f64) -> (f64, f64) {
    reference.state_at_tau(t - t0).unwrap_or((f64::NAN, f64::NAN))
}

fn solve(ctx: &Ctx, args: &SystemArgs) -> Outcome {
    let def = load_definition(&args.system)?;
    let field = def.build()?;
    let st = ctx.table(12)?;
    let t_end = ctx.t_end();
    let (traj, failure) = run_trajectory(&field, &st, (def.y0, def.z0), t_end, ctx.common.dtau);
    if traj.is_empty() {
        return Err(failure.unwrap_or_else(|| usage("empty trajectory")));
    }
    let reference = if args.classical {
        Some(classical_states(&field, ctx.common.t0, (def.y0, def.z0), t_end, ctx.common.dtau)?)
    } else {
        None
    };
    let columns: &[&'static str] = if reference.is_some() {
        &["t", "tau", "y", "z", "y_classical", "z_classical"]
    } else {
        &["t", "tau", "y", "z"]
    };
    let mut table = Table::new(columns);
    for s in &traj.samples {
        let mut row = vec![s.t.into(), s.tau.into(), s.y.into(), s.z.into()];
        if let Some(r) = &reference {
            let (yc, zc) = classical_at(r, ctx.common.t0, s.t);
            row.extend([yc.into(), zc.into()]);
        }
        table.push(row);
    }
    ctx.write_table(&table)?;
    failure.map_or(Ok(()), Err)
}

fn stability(ctx: &Ctx, args: &SystemArgs, horizon: f64) -> Outcome {
    if ctx.common.format == Some(Format::Csv) {
        return Err(usage("stability reports are JSON only"));
    }
    let def = load_definition(&args.system)?;
    let field = def.build()?;
    let st = ctx.table(8)?;
    let alpha = st.alpha();
    let config = StabilityConfig {
        horizon,
        ..StabilityConfig::default()
    };
    let equilibrium = (def.equilibrium[0], def.equilibrium[1]);
    let lyapunov = def.lyapunov(&field)?;
    let mut report = serde_json::Map::new();
    report.insert("alpha".into(), json!(alpha));
    report.insert(
        "lyapunov_definiteness".into(),
        json!(lyapunov.definiteness(0.0, equilibrium, 1.0, 4, field.state_dim())),
    );

    let classification = classify_stability(&field, &st, equilibrium, &config);
    match (&field, classification) {
        (_, Ok(r)) => {
            report.insert("stability".into(), json!(r));
        }
        (System::SecondOrder(_), Err(Error::Parameter(msg))) => {
            report.insert("stability".into(), json!({ "skipped": msg }));
        }
        (_, Err(e)) => return Err(e.into()),
    }

    if let System::SecondOrder(sys) = &field {
        let theorem = TheoremConfig {
            dtau: ctx.common.dtau.max(1e-3),
            ..TheoremConfig::default()
        };
        let assumptions = check_assumptions(sys, alpha, &AssumptionGrids::default());
        report.insert("assumptions".into(), json!(assumptions));
        let forced = def_is_forced(&def);
        let verdict = if forced {
            verify_forced_boundedness(sys, alpha, &theorem)
        } else {
            verify_unforced_stability(sys, alpha, &theorem)
        };
        let key = if forced { "forced_boundedness" } else { "unforced_stability" };
        let value = match verdict {
            Ok(r) => json!(r),
            Err(Error::Precondition { failing }) => json!({ "refused": true, "failing": failing }),
            Err(e) => return Err(e.into()),
        };
        report.insert(key.into(), value);
    }
    ctx.write(&pretty_json(&Value::Object(report)))
}

fn def_is_forced(def: &SystemDefinition) -> bool {
    matches!(&def.model, fractal_calc::definition::ModelSpec::SecondOrder { q: Some(_), .. })
}

fn demo(ctx: &Ctx, model: DemoModel, z0: &[f64], y0: f64, stiffness: f64, classical: bool) -> Outcome {
    let st = ctx.table(12)?;
    let t_end = ctx.t_end();
    let dtau = ctx.common.dtau;
    let (field, lyapunov): (Box<dyn PlanarField>, LyapunovFunction) = match model {
        DemoModel::Decay => (Box::new(models::exponential_decay()), models::decay_energy()),
        DemoModel::Lienard => (Box::new(models::cubic_lienard()), models::lienard_energy()),
        DemoModel::Oscillator => (
            Box::new(models::harmonic_oscillator(stiffness)),
            models::oscillator_energy(stiffness),
        ),
    };
    let starts: Vec<(f64, f64)> = match (model, z0.is_empty()) {
        (DemoModel::Decay, true) => vec![(1.0, 0.0), (0.5, 0.0)],
        (DemoModel::Decay, false) => z0.iter().map(|&c| (c, 0.0)).collect(),
        (_, true) => vec![(y0, 0.0)],
        (_, false) => z0.iter().map(|&z| (y0, z)).collect(),
    };

    let mut columns = vec!["run", "t", "tau", "y", "z", "lyapunov"];
    if classical {
        columns.extend(["y_classical", "z_classical", "lyapunov_classical"]);
    }
    let mut table = Table::new(&columns);
    let mut failure = None;
    for (k, &start) in starts.iter().enumerate() {
        let result = match model {
            DemoModel::Decay => solve_first_order(|h| -h, &st, start.0, t_end, dtau),
            _ => solve_second_order(field.as_ref(), &st, start.0, start.1, t_end, dtau),
        };
        let (traj, fail) = settle(result);
        let reference = if classical {
            Some(classical_states(field.as_ref(), ctx.common.t0, start, t_end, dtau)?)
        } else {
            None
        };
        for s in &traj.samples {
            let mut row = vec![
                Cell::from(k),
                s.t.into(),
                s.tau.into(),
                s.y.into(),
                s.z.into(),
                lyapunov.value(s.tau, s.y, s.z).into(),
            ];
            if let Some(r) = &reference {
                let (yc, zc) = classical_at(r, ctx.common.t0, s.t);
                row.extend([yc.into(), zc.into(), lyapunov.value(s.t - ctx.common.t0, yc, zc).into()]);
            }
            table.push(row);
        }
        if fail.is_some() {
            failure = fail;
            break;
        }
    }
    ctx.write_table(&table)?;
    failure.map_or(Ok(()), Err)
}
