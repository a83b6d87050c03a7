//! Command implementations. Each returns an [`Outcome`] carrying the JSON
//! report, its table view and whether every verification passed.

use std::fmt::Write as _;

use num_rational::BigRational;
use pordkit_core::enumerate::{enumerate, gl_order, levi_order, GroupKind};
use pordkit_core::padic::{format_exponent, parse_rational};
use pordkit_core::projector::{
    check_limit_convergence, dual_projector_check, ConvergenceReport, ConvergenceStatus,
    ProjectorReport,
};
use pordkit_core::weyl::{
    block_group_order, block_permutation_check, filtration_layout, weyl_set_lm, weyl_set_lm_oracle,
    weyl_set_pq, weyl_set_pq_oracle, FiltrationLayout,
};
use pordkit_core::{
    ordinary_projector, verify_double_coset, BlockShape, CosetReport, OrdinarityConfig,
    OrdinarityReport, PMatrix, ShapeParams, WeylElement,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    load, CosetsArgs, Globals, OrdersArgs, OrdinarityArgs, ProjectorArgs, SweepArgs, Task, WeylArgs,
};
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub json: String,
    pub table: String,
    pub passed: bool,
}

fn outcome<T: Serialize>(value: &T, table: String, passed: bool) -> Result<Outcome, CliError> {
    let mut json =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push('\n');
    Ok(Outcome {
        json,
        table,
        passed,
    })
}

/// Serde name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

pub fn run_task(g: &Globals, task: &Task) -> Result<Outcome, CliError> {
    match task {
        Task::Cosets(a) => cosets(g, a),
        Task::Ordinarity(a) => ordinarity(a),
        Task::Projector(a) => projector(g, a),
        Task::Weyl(a) => weyl(g, a),
        Task::Orders(a) => orders(g, a),
        Task::Sweep(a) => sweep(g, a),
    }
}

#[derive(Serialize)]
struct CosetsOutput {
    passed: bool,
    reports: Vec<CosetReport>,
}

fn coset_table(reports: &[CosetReport]) -> String {
    let mut t =
        String::from("j  i  p  r  count  expected  disjoint  covered  full  factor  result\n");
    for r in reports {
        let _ = writeln!(
            t,
            "{}  {}  {}  {}  {}  {}  {}  {}  {}  {}  {}",
            r.j,
            r.i,
            r.p,
            r.r,
            r.count,
            r.expected_count,
            mark(r.disjoint),
            r.covered,
            r.full_coverage.as_deref().unwrap_or("-"),
            mark(r.factorization_ok),
            if r.passed() { "pass" } else { "FAIL" }
        );
    }
    t
}

fn check_coset_budget(shape: &BlockShape, j: usize, p: u64, budget: u64) -> Result<(), CliError> {
    let i = shape.partial_sum(j)?;
    let count = (p as u128)
        .checked_pow((i * (shape.n() - i)) as u32)
        .unwrap_or(u128::MAX);
    // disjointness compares all ordered pairs
    let work = count.saturating_mul(count);
    if work > budget as u128 {
        return Err(pordkit_core::Error::BudgetExceeded {
            candidates: work,
            budget: budget as u128,
        }
        .into());
    }
    Ok(())
}

fn cosets(g: &Globals, args: &CosetsArgs) -> Result<Outcome, CliError> {
    let shape = args.shape.build()?;
    let js: Vec<usize> = if args.all_j {
        (1..=shape.r_blocks()).collect()
    } else {
        vec![args.j]
    };
    let reports = js
        .iter()
        .map(|&j| {
            check_coset_budget(&shape, j, g.p, g.budget)?;
            Ok(verify_double_coset(
                &shape,
                j,
                g.p,
                g.r,
                args.samples,
                g.seed,
            )?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let passed = reports.iter().all(CosetReport::passed);
    let table = format!("shape {shape}\n{}", coset_table(&reports));
    outcome(&CosetsOutput { passed, reports }, table, passed)
}

fn ordinarity(args: &OrdinarityArgs) -> Result<Outcome, CliError> {
    let cfg: OrdinarityConfig = load(&args.config)?;
    let rep = cfg.run()?;
    let table = ordinarity_table(&rep);
    // a verdict is data, never a failure
    outcome(&rep, table, true)
}

fn ordinarity_table(rep: &OrdinarityReport) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "shape a={} b={} d_top={:?} d_bot={:?}",
        rep.shape.a, rep.shape.b, rep.shape.d_top, rep.shape.d_bot
    );
    let _ = writeln!(
        t,
        "inequality {}  theta regular {}",
        mark(rep.inequality_ok),
        mark(rep.theta_regular)
    );
    let _ = writeln!(t, "x            v(beta_x(s_j))");
    for row in &rep.beta_table {
        let vals: Vec<String> = row.valuations.iter().map(format_exponent).collect();
        let _ = writeln!(
            t,
            "{:<12} {}{}",
            format!("{:?}", row.x),
            vals.join(" "),
            if row.all_zero() { "  unit" } else { "" }
        );
    }
    let _ = writeln!(
        t,
        "verdict {}  shadow {}",
        label(&rep.verdict),
        label(&rep.shadow)
    );
    for note in &rep.notes {
        let _ = writeln!(t, "note: {note}");
    }
    t
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Entry {
    Int(i64),
    Text(String),
}

#[derive(Deserialize)]
struct MatrixFile {
    #[serde(default)]
    p: Option<u64>,
    rows: Vec<Vec<Entry>>,
}

fn read_matrix(g: &Globals, args: &ProjectorArgs) -> Result<PMatrix<BigRational>, CliError> {
    let file: MatrixFile = load(&args.matrix)?;
    let rows = file
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| match e {
                    Entry::Int(v) => Ok(BigRational::from_integer((*v).into())),
                    Entry::Text(s) => parse_rational(s),
                })
                .collect::<pordkit_core::Result<Vec<_>>>()
        })
        .collect::<pordkit_core::Result<Vec<_>>>()?;
    let p = file.p.unwrap_or(g.p);
    pordkit_core::padic::check_prime(p)?;
    Ok(PMatrix::from_rows(rows, p)?)
}

#[derive(Serialize)]
struct ProjectorOutput {
    #[serde(flatten)]
    report: ProjectorReport,
    dual_ok: bool,
    limit_n: u32,
    convergence: ConvergenceReport,
    passed: bool,
}

fn projector(g: &Globals, args: &ProjectorArgs) -> Result<Outcome, CliError> {
    if g.precision == 0 {
        return Err(CliError::Config("precision must be positive".into()));
    }
    let u = read_matrix(g, args)?;
    let proj = ordinary_projector(&u, g.precision)?;
    let dual_ok = dual_projector_check(&u, g.precision)?;
    let limit_n = args.limit_n.unwrap_or((u.n() as u32).max(6));
    let convergence = check_limit_convergence(&u, &proj, limit_n, g.precision)?;
    let report = proj.report();
    let passed =
        report.certificates.all() && dual_ok && convergence.status != ConvergenceStatus::Violated;

    let mut t = String::new();
    let _ = writeln!(
        t,
        "p {}  R {}  rank {}",
        report.p, report.precision, report.rank
    );
    let slopes: Vec<String> = report
        .newton_polygon
        .iter()
        .map(|s| format!("{}^{}", label(&s.slope), s.multiplicity))
        .collect();
    let _ = writeln!(t, "newton slopes {}", slopes.join(" "));
    let _ = writeln!(t, "e mod {}:", report.modulus);
    for row in &report.e {
        let _ = writeln!(t, "  {}", row.join(" "));
    }
    let c = &report.certificates;
    let _ = writeln!(
        t,
        "idempotent {}  commutes {}  hensel {}  bezout {}  rank {}  dual {}",
        mark(c.idempotent),
        mark(c.commutes),
        mark(c.hensel),
        mark(c.bezout),
        mark(c.rank),
        mark(dual_ok)
    );
    let _ = writeln!(
        t,
        "U^({limit_n}!) {} (limit reached: {})",
        label(&convergence.status),
        convergence.limit_reached
    );
    outcome(
        &ProjectorOutput {
            report,
            dual_ok,
            limit_n,
            convergence,
            passed,
        },
        t,
        passed,
    )
}

#[derive(Serialize)]
struct LeviGroupCheck {
    size: usize,
    expected_size: usize,
    matches_block_permutations: bool,
}

#[derive(Serialize)]
struct OracleCheck {
    p: u64,
    w_pq_agrees: bool,
    w_lm_agrees: bool,
}

#[derive(Serialize)]
struct WeylOutput {
    l_blocks: Vec<usize>,
    m_blocks: Vec<usize>,
    w_pq: Vec<Vec<usize>>,
    w_lm: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    levi_group: Option<LeviGroupCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
    layout: FiltrationLayout,
    passed: bool,
}

fn one_lines(xs: &[WeylElement]) -> Vec<Vec<usize>> {
    xs.iter().map(WeylElement::one_line).collect()
}

fn weyl(g: &Globals, args: &WeylArgs) -> Result<Outcome, CliError> {
    let l = &args.l_blocks;
    let m = args.m_blocks.as_ref().unwrap_or(l);
    let pq = weyl_set_pq(l, m)?;
    let lm = weyl_set_lm(l, m)?;
    let levi_group = if l == m {
        Some(LeviGroupCheck {
            size: lm.len(),
            expected_size: block_group_order(l),
            matches_block_permutations: block_permutation_check(l)?,
        })
    } else {
        None
    };
    let oracle = if args.oracle {
        let budget = g.budget as u128;
        Some(OracleCheck {
            p: g.p,
            w_pq_agrees: weyl_set_pq_oracle(l, m, g.p, budget)? == pq,
            w_lm_agrees: weyl_set_lm_oracle(l, m, g.p, budget)? == lm,
        })
    } else {
        None
    };
    let passed = levi_group
        .as_ref()
        .is_none_or(|c| c.matches_block_permutations && c.size == c.expected_size)
        && oracle
            .as_ref()
            .is_none_or(|o| o.w_pq_agrees && o.w_lm_agrees);

    let mut t = String::new();
    let _ = writeln!(t, "L {l:?}  M {m:?}");
    let _ = writeln!(t, "W(P,Q) {} elements", pq.len());
    for x in &pq {
        let _ = writeln!(t, "  {x}");
    }
    let _ = writeln!(t, "W(L,M) {} elements", lm.len());
    for x in &lm {
        let _ = writeln!(t, "  {x}");
    }
    if let Some(c) = &levi_group {
        let _ = writeln!(
            t,
            "W(L,L) block permutations {}",
            mark(c.matches_block_permutations)
        );
    }
    if let Some(o) = &oracle {
        let _ = writeln!(
            t,
            "oracle p={}: W(P,Q) {}  W(L,M) {}",
            o.p,
            mark(o.w_pq_agrees),
            mark(o.w_lm_agrees)
        );
    }
    let out = WeylOutput {
        l_blocks: l.clone(),
        m_blocks: m.clone(),
        w_pq: one_lines(&pq),
        w_lm: one_lines(&lm),
        levi_group,
        oracle,
        layout: filtration_layout(l, m)?,
        passed,
    };
    outcome(&out, t, passed)
}

#[derive(Serialize)]
struct OrderRow {
    kind: GroupKind,
    order: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form: Option<u128>,
}

#[derive(Serialize)]
struct QuotientCheck {
    iwahori0: u128,
    iwahori: u128,
    levi: u128,
    ok: bool,
}

#[derive(Serialize)]
struct OrdersOutput {
    shape: ShapeParams,
    p: u64,
    r: u32,
    groups: Vec<OrderRow>,
    quotient: QuotientCheck,
    passed: bool,
}

fn orders(g: &Globals, args: &OrdersArgs) -> Result<Outcome, CliError> {
    let shape = args.shape.build()?;
    let budget = g.budget as u128;
    let mut groups = Vec::new();
    for kind in GroupKind::ALL {
        let order = enumerate(kind, &shape, g.p, g.r, budget)?.len() as u128;
        let closed_form = match kind {
            GroupKind::Gl => Some(gl_order(shape.n(), g.p, g.r)),
            GroupKind::Levi => Some(levi_order(&shape, g.p, g.r)),
            _ => None,
        };
        groups.push(OrderRow {
            kind,
            order,
            closed_form,
        });
    }
    let find = |k: GroupKind| {
        groups
            .iter()
            .find(|row| row.kind == k)
            .map_or(0, |row| row.order)
    };
    let (i0, i1) = (find(GroupKind::Iwahori0), find(GroupKind::Iwahori));
    let levi = levi_order(&shape, g.p, g.r);
    let quotient = QuotientCheck {
        iwahori0: i0,
        iwahori: i1,
        levi,
        ok: i1 > 0 && i0 % i1 == 0 && i0 / i1 == levi,
    };
    let passed = quotient.ok
        && groups
            .iter()
            .all(|row| row.closed_form.is_none_or(|c| c == row.order));

    let mut t = format!("shape {shape}  p {}  r {}\n", g.p, g.r);
    for row in &groups {
        let _ = writeln!(
            t,
            "{:<9} {:>12}{}",
            label(&row.kind),
            row.order,
            row.closed_form
                .map_or(String::new(), |c| format!("  (closed form {c})"))
        );
    }
    let _ = writeln!(t, "|I0|/|I| = |L| {}", mark(quotient.ok));
    outcome(
        &OrdersOutput {
            shape: shape.params(),
            p: g.p,
            r: g.r,
            groups,
            quotient,
            passed,
        },
        t,
        passed,
    )
}

#[derive(Serialize)]
struct SweepRow {
    shape: ShapeParams,
    j: usize,
    p: u64,
    r: u32,
    count: u128,
    expected_count: u128,
    covered: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_coverage: Option<String>,
    passed: bool,
}

#[derive(Serialize)]
struct SweepOutput {
    cells: usize,
    passed_cells: usize,
    rows: Vec<SweepRow>,
    passed: bool,
}

fn sweep(g: &Globals, args: &SweepArgs) -> Result<Outcome, CliError> {
    if args.n_min == 0 || args.n_min > args.n_max {
        return Err(CliError::Config(format!(
            "empty size range {}..={}",
            args.n_min, args.n_max
        )));
    }
    let mut cells = Vec::new();
    for n in args.n_min..=args.n_max {
        for shape in BlockShape::all_with_n(n) {
            for j in 1..=shape.r_blocks() {
                for &p in &args.primes {
                    for &r in &args.levels {
                        check_coset_budget(&shape, j, p, g.budget)?;
                        cells.push((shape.clone(), j, p, r));
                    }
                }
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|(shape, j, p, r)| {
                let rep = verify_double_coset(shape, *j, *p, *r, args.samples, g.seed)?;
                Ok(SweepRow {
                    shape: rep.shape.clone(),
                    j: rep.j,
                    p: rep.p,
                    r: rep.r,
                    count: rep.count,
                    expected_count: rep.expected_count,
                    covered: rep.covered.clone(),
                    passed: rep.passed(),
                    full_coverage: rep.full_coverage,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    let passed_cells = rows.iter().filter(|r| r.passed).count();
    let passed = passed_cells == rows.len();
    let mut t = String::from("a  b  d_top      d_bot      j  p  r  count  covered  result\n");
    for row in &rows {
        let _ = writeln!(
            t,
            "{}  {}  {:<9}  {:<9}  {}  {}  {}  {}  {}  {}",
            row.shape.a,
            row.shape.b,
            format!("{:?}", row.shape.d_top),
            format!("{:?}", row.shape.d_bot),
            row.j,
            row.p,
            row.r,
            row.count,
            row.covered,
            if row.passed { "pass" } else { "FAIL" }
        );
    }
    let _ = writeln!(t, "{passed_cells}/{} cells passed", rows.len());
    outcome(
        &SweepOutput {
            cells: rows.len(),
            passed_cells,
            rows,
            passed,
        },
        t,
        passed,
    )
}
