//! Command-line interface. Every command produces one JSON report.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::abelianization::{ge2_abelianization, m_subgroup, n_ideal, rank_and_finiteness};
use crate::algebra::{parse_rational, Element};
use crate::catalog::build_named;
use crate::decide::{
    component_predicates, decide_fa_borel, decide_fa_e2, decide_hfa, decide_hfa_e2, decide_odd_order, grk_criterion,
    DiagonalMode, CUT_CRITERION_NOTE,
};
use crate::error::{Error, Result};
use crate::groups::{is_cut, FiniteGroupTable};
use crate::lattice::FiniteAbelianInvariants;
use crate::order::{Order, OrderElement};
use crate::units::{identify_group, rational_span, unit_basis_witness, unit_group};
use crate::words::{
    alpha_relations, eval_word, ge2_decompose, reduce_relation, verify_relation_suite, Matrix2, Relation, Word,
};

#[derive(Parser, Debug)]
#[command(name = "ge2units", version, about = "Exact invariants of E2/GE2 over definite orders and HFA decisions for U(ZG)")]
pub struct Cli {
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orders and their unit groups.
    Order {
        #[arg(value_enum)]
        action: OrderAction,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Abelianizations of E2 and GE2.
    Ab {
        #[arg(value_enum)]
        action: AbAction,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Relations in GE2.
    Rel {
        #[arg(value_enum)]
        action: RelAction,
        #[command(flatten)]
        order: OrderArg,
        /// Word such as `E([1,1]);E([1,-1])`.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit reduction steps as JSON lines before the report.
        #[arg(long)]
        trace: bool,
    },
    /// Matrices over Euclidean orders.
    Mat {
        #[arg(value_enum)]
        action: MatAction,
        #[command(flatten)]
        order: OrderArg,
        /// Matrix `[[a,b],[c,d]]` whose entries are coordinate arrays.
        #[arg(long)]
        matrix: Option<String>,
        /// Alternatively, a word whose value is decomposed.
        #[arg(long)]
        word: Option<String>,
    },
    /// Order-level property decisions.
    Decide {
        #[arg(value_enum)]
        action: DecideAction,
        #[command(flatten)]
        order: OrderArg,
        #[arg(long, default_value = "D2")]
        mode: String,
    },
    /// Finite groups and the HFA decision for U(ZG).
    Group {
        #[arg(value_enum)]
        action: GroupAction,
        /// Builtin name, `perm:[[..],..]` (or a bare JSON list) or `table:[[..],..]`.
        #[arg(long)]
        group: String,
        /// Accept even order in `odd`, asserting there are no type-II components.
        #[arg(long)]
        assume_no_type_two: bool,
    },
}

#[derive(Args, Debug)]
pub struct OrderArg {
    /// Builtin name (Z, I1, L, O2, Zsqrt:-5, Iq:7, ...) or `custom:{json}`.
    #[arg(long)]
    pub order: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OrderAction {
    Info,
    Units,
    Inv,
    Span,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AbAction {
    E2,
    Ge2,
    Rank,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RelAction {
    Verify,
    Alpha,
    Reduce,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MatAction {
    Decompose,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DecideAction {
    E2Fa,
    E2Hfa,
    BorelFa,
    Grk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GroupAction {
    Build,
    Cut,
    Hfa,
    Odd,
    Components,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let mut lines = Vec::new();
    match execute(&cli.command, &mut lines) {
        Ok(report) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&report).unwrap_or_default()
            } else {
                report.to_string()
            };
            lines.push(body);
            Outcome { code: 0, stdout: lines.join("\n") + "\n", stderr: String::new() }
        }
        Err(e) => Outcome { code: e.exit_code(), stdout: lines.join("\n"), stderr: format!("error: {e}\n") },
    }
}

fn coords(order: &Order, x: &OrderElement) -> Value {
    json!(order.to_element(x).to_strings())
}

fn coords_list(order: &Order, xs: &[OrderElement]) -> Value {
    Value::Array(xs.iter().map(|x| coords(order, x)).collect())
}

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn invariants_json(inv: &FiniteAbelianInvariants) -> Value {
    json!({
        "invariants": inv.torsion.iter().map(big).collect::<Vec<_>>(),
        "free_rank": inv.free_rank,
        "structure": inv.to_string(),
    })
}

fn relation_json(order: &Order, r: &Relation) -> Value {
    json!({
        "word": Word::from_es(&r.ts).display(order).to_string(),
        "diagonal": [coords(order, &r.diagonal.mu), coords(order, &r.diagonal.nu)],
    })
}

fn execute(command: &Command, lines: &mut Vec<String>) -> Result<Value> {
    match command {
        Command::Order { action, order } => order_command(*action, &Order::parse_spec(&order.order)?),
        Command::Ab { action, order } => ab_command(*action, &Order::parse_spec(&order.order)?),
        Command::Rel { action, order, word, samples, seed, trace } => {
            let order = Order::parse_spec(&order.order)?;
            rel_command(*action, &order, word.as_deref(), *samples, *seed, *trace, lines)
        }
        Command::Mat { action: MatAction::Decompose, order, matrix, word } => {
            let order = Order::parse_spec(&order.order)?;
            let m = match (matrix, word) {
                (Some(m), _) => parse_matrix(&order, m)?,
                (None, Some(w)) => eval_word(&order, &Word::parse(&order, w)?)?,
                (None, None) => return Err(Error::parse(0, "mat decompose needs --matrix or --word")),
            };
            let w = ge2_decompose(&order, &m)?;
            Ok(json!({
                "order": order.name(),
                "matrix": m.display(&order),
                "word": w.display(&order).to_string(),
                "letters": w.len(),
            }))
        }
        Command::Decide { action, order, mode } => {
            let order = Order::parse_spec(&order.order)?;
            decide_command(*action, &order, mode)
        }
        Command::Group { action, group, assume_no_type_two } => {
            group_command(*action, &parse_group(group)?, group, *assume_no_type_two)
        }
    }
}

fn order_command(action: OrderAction, order: &Order) -> Result<Value> {
    match action {
        OrderAction::Info => Ok(json!({
            "name": order.name(),
            "descriptor": order.algebra().to_string(),
            "rank": order.rank(),
            "basis": order.basis().iter().map(Element::to_strings).collect::<Vec<_>>(),
            "trace_form": order.trace_form(),
        })),
        OrderAction::Units => {
            let ug = unit_group(order)?;
            Ok(json!({
                "order": order.name(),
                "count": ug.order(),
                "structure": ug.structure(),
                "elements": coords_list(order, &ug.elements),
                "generators": coords_list(order, &ug.generators()),
                "abelianization": invariants_json(&ug.abelianization()),
            }))
        }
        OrderAction::Inv => {
            let ug = unit_group(order)?;
            let witness = unit_basis_witness(order, &ug);
            Ok(json!({
                "order": order.name(),
                "inv": witness.len(),
                "rank": order.rank(),
                "witness": coords_list(order, &witness),
            }))
        }
        OrderAction::Span => {
            let ug = unit_group(order)?;
            let derived: Vec<OrderElement> =
                ug.derived_subgroup().elements.iter().map(|&i| ug.elements[i].clone()).collect();
            Ok(json!({
                "order": order.name(),
                "units_span": rational_span(&ug.elements),
                "derived_span": rational_span(&derived),
                "rank": order.rank(),
            }))
        }
    }
}

fn ab_command(action: AbAction, order: &Order) -> Result<Value> {
    match action {
        AbAction::E2 => {
            let m = m_subgroup(order)?;
            let inv = m.quotient(order.rank()).invariants().clone();
            let mut v = invariants_json(&inv);
            let obj = v.as_object_mut().expect("object");
            obj.insert("order".into(), json!(order.name()));
            obj.insert(
                "generators".into(),
                json!({
                    "type1": coords_list(order, &m.type1),
                    "type2": coords_list(order, &m.type2),
                    "type3": coords_list(order, &m.type3),
                    "type4": coords_list(order, &m.type4),
                }),
            );
            obj.insert("m_basis".into(), json!(m.lattice.iter().map(|r| r.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>()));
            obj.insert("loop_graph".into(), json!({"states": m.loop_graph.states, "edges": m.loop_graph.edges}));
            Ok(v)
        }
        AbAction::Ge2 => {
            let r = ge2_abelianization(order)?;
            let n = n_ideal(order)?;
            Ok(json!({
                "order": order.name(),
                "o_mod_n": invariants_json(&r.o_mod_n),
                "u_ab": invariants_json(&r.u_ab),
                "total_order": big(&r.total_order),
                "collapsed": r.collapsed,
                "n_basis": n.iter().map(|r| r.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }))
        }
        AbAction::Rank => {
            let r = rank_and_finiteness(order)?;
            let c = &r.conditions;
            Ok(json!({
                "order": order.name(),
                "rank": r.rank,
                "inv": r.inv,
                "free_rank": r.e2_ab.free_rank,
                "equation": {"free_rank": r.e2_ab.free_rank, "rank": r.rank, "inv": r.inv},
                "e2_ab": invariants_json(&r.e2_ab),
                "finite": r.finite,
                "conditions": {
                    "a_finite_abelianization": c.finite_abelianization,
                    "b_isomorphic_to_listed_order": c.isomorphic_to_listed_order,
                    "c_unit_basis": c.unit_basis,
                    "d_ring_generated_by_units": c.ring_generated_by_units,
                    "e_module_generated_by_units": c.module_generated_by_units,
                },
                "unit_basis": coords_list(order, &r.unit_basis),
            }))
        }
    }
}

fn rel_command(
    action: RelAction,
    order: &Order,
    word: Option<&str>,
    samples: usize,
    seed: u64,
    trace: bool,
    lines: &mut Vec<String>,
) -> Result<Value> {
    match action {
        RelAction::Verify => {
            let r = verify_relation_suite(order, samples, seed)?;
            let checked: Map<String, Value> = r.checked.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            Ok(json!({"order": order.name(), "samples": samples, "seed": seed, "checked": checked, "all_pass": true}))
        }
        RelAction::Alpha => {
            let r = alpha_relations(order)?;
            Ok(json!({"order": order.name(), "norm2": r.norm_two, "norm3": r.norm_three, "all_pass": true}))
        }
        RelAction::Reduce => {
            let text = word.ok_or_else(|| Error::parse(0, "rel reduce needs --word"))?;
            let w = Word::parse(order, text)?;
            let t = reduce_relation(order, &w)?;
            let steps: Vec<Value> = t
                .steps
                .iter()
                .map(|s| {
                    json!({
                        "rule": s.rule.to_string(),
                        "before": relation_json(order, &s.before),
                        "after": relation_json(order, &s.after),
                        "m": big(&s.measure.0),
                        "h": s.measure.1,
                    })
                })
                .collect();
            if trace {
                lines.extend(steps.iter().map(Value::to_string));
            }
            Ok(json!({
                "order": order.name(),
                "start": relation_json(order, &t.start),
                "end": relation_json(order, &t.end),
                "steps": steps.len(),
                "descent_steps": t.descent_steps(),
            }))
        }
    }
}

fn decide_command(action: DecideAction, order: &Order, mode: &str) -> Result<Value> {
    match action {
        DecideAction::E2Fa => Ok(json!({"order": order.name(), "fa": decide_fa_e2(order)?})),
        DecideAction::E2Hfa => Ok(json!({"order": order.name(), "hfa": decide_hfa_e2(order)?})),
        DecideAction::BorelFa => {
            let ug = unit_group(order)?;
            Ok(json!({"order": order.name(), "fa": decide_fa_borel(order)?, "units": identify_group(&ug.group)}))
        }
        DecideAction::Grk => {
            let mode: DiagonalMode = mode.parse()?;
            let w = grk_criterion(order, mode)?;
            let witness = match &w {
                Some(w) => json!({
                    "lambda": [coords(order, &w.mu), coords(order, &w.nu)],
                    "charpoly": w.charpoly.iter().map(big).collect::<Vec<_>>(),
                }),
                None => json!("none"),
            };
            Ok(json!({"order": order.name(), "mode": format!("{mode:?}"), "witness": witness}))
        }
    }
}

fn group_command(action: GroupAction, g: &FiniteGroupTable, spec: &str, assume: bool) -> Result<Value> {
    match action {
        GroupAction::Build => Ok(json!({
            "group": spec,
            "order": g.order(),
            "abelian": g.is_abelian(),
            "classes": g.conjugacy_classes().len(),
            "center": g.center().order(),
            "derived_series": g.derived_series_orders(),
            "abelianization": invariants_json(&g.abelianization()),
            "structure": if g.order() <= 48 { identify_group(g) } else { "other".into() },
        })),
        GroupAction::Cut => Ok(json!({"group": spec, "cut": is_cut(g), "criterion": CUT_CRITERION_NOTE})),
        GroupAction::Hfa => {
            let d = decide_hfa(g)?;
            Ok(json!({
                "group": spec,
                "hfa": d.hfa,
                "fab": d.fab,
                "T": d.t,
                "hfr": d.hfr,
                "cut": d.cut,
                "forbidden_witness": d.forbidden_witness,
                "certificate": d.certificate,
                "fa": "open",
                "criterion": CUT_CRITERION_NOTE,
            }))
        }
        GroupAction::Odd => {
            let r = decide_odd_order(g, assume)?;
            Ok(json!({
                "group": spec,
                "hfa": r.hfa,
                "fab": r.fab,
                "finite_abelianization": r.finite_abelianization,
                "cut": r.cut,
            }))
        }
        GroupAction::Components => {
            let c = component_predicates(g)?;
            Ok(json!({"group": spec, "has_m2q": c.has_m2q, "has_m2h5": c.has_m2h5, "solvable": c.solvable}))
        }
    }
}

fn json_rows(text: &str, offset: usize) -> Result<Vec<Vec<usize>>> {
    serde_json::from_str(text).map_err(|e| Error::parse(offset + e.column().saturating_sub(1), format!("bad JSON: {e}")))
}

pub fn parse_group(spec: &str) -> Result<FiniteGroupTable> {
    let t = spec.trim();
    if let Some(rest) = t.strip_prefix("table:") {
        return FiniteGroupTable::from_table(json_rows(rest, 6)?, None).map_err(|e| Error::parse(6, e.to_string()));
    }
    if let Some(rest) = t.strip_prefix("perm:") {
        return FiniteGroupTable::from_permutations(&json_rows(rest, 5)?).map_err(|e| Error::parse(5, e.to_string()));
    }
    if t.starts_with('[') {
        return FiniteGroupTable::from_permutations(&json_rows(t, 0)?).map_err(|e| Error::parse(0, e.to_string()));
    }
    build_named(t)
}

fn parse_entry(order: &Order, v: &Value) -> Result<OrderElement> {
    let items = v.as_array().ok_or_else(|| Error::parse(0, "matrix entries must be coordinate arrays"))?;
    let mut c = Vec::with_capacity(items.len());
    for item in items {
        let s = match item {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(Error::parse(0, "coordinates must be numbers or \"p/q\" strings")),
        };
        c.push(parse_rational(&s)?);
    }
    let e = Element::new(order.algebra(), c)?;
    order.from_element(&e).map_err(|_| {
        Error::parse(0, format!("entry {} is not in {}", e.to_strings().iter().map(|s| s.as_str()).collect::<Vec<_>>().join(","), order.name()))
    })
}

pub fn parse_matrix(order: &Order, text: &str) -> Result<Matrix2> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::parse(e.column().saturating_sub(1), format!("bad JSON: {e}")))?;
    let rows = v.as_array().filter(|r| r.len() == 2).ok_or_else(|| Error::parse(0, "matrix must have two rows"))?;
    let mut entries = Vec::with_capacity(4);
    for row in rows {
        let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(|| Error::parse(0, "rows must have two entries"))?;
        for e in row {
            entries.push(parse_entry(order, e)?);
        }
    }
    let [a, b, c, d]: [OrderElement; 4] = entries.try_into().map_err(|_| Error::parse(0, "matrix must be 2x2"))?;
    Ok(Matrix2([a, b, c, d]))
}
