//! The subcommands, each rendering into an [`Output`].

use num_complex::Complex64;
use serde_json::{json, Value};

use ringclass_core::hecke::TensorProduct;
use ringclass_core::lseries::{smoothing_reach, Afe, AfeOptions, RankinFamily, RankinSetup, RootNumberRule, Truncation, POLE_THRESHOLD};
use ringclass_core::moments::{
    average_route_a, average_route_b, b0_contour_check, main_term, DivisorOrder, MainTermInputs, PrimitiveAverages,
    RouteB, RouteBVariant,
};
use ringclass_core::quad::{dedekind_class_number, ClassGroup, OrderTower, QuadOrder};
use ringclass_core::shifted::{exponent_fit, shifted_reach, shifted_sum, BoundSlopes, Window};
use ringclass_core::special::{whittaker_small_y_exponent, CutoffTolerances};

use crate::cli::{AverageArgs, CentralArgs, DivisorOrderArg, OrderArgs, RouteArg, Rule, SetupArgs, ShiftedArgs, WhittakerArgs, WindowArg};
use crate::error::{CliError, Result};
use crate::forms::{load_tensor, FormSpec};
use crate::output::{finite, num, Output};

/// Prime bound used to read off levels and weights before the real range is
/// known.
const PROVISIONAL_P_MAX: u64 = 100;

pub fn classgroup(args: &OrderArgs) -> Result<Output> {
    let order = QuadOrder::new(args.disc, args.conductor)?;
    let tower = OrderTower::new(order)?;
    let top = tower.top();
    let h_k = ClassGroup::new(order.d_k)?.order() as u64;
    let chars = tower.characters();
    let divisors: Vec<Value> = tower
        .divisors
        .iter()
        .zip(tower.class_numbers())
        .map(|(&e, h)| json!({"e": e, "disc": order.d_k * (e * e) as i64, "h": h}))
        .collect();
    let characters: Vec<Value> =
        chars.iter().map(|c| json!({"index": c.index, "order": c.chi.order(), "conductor": c.conductor})).collect();
    let result = json!({
        "d_k": order.d_k,
        "c": order.c,
        "disc": order.disc(),
        "h": top.order(),
        "dedekind_h": dedekind_class_number(order.d_k, order.c, h_k)?,
        "invariants": top.invariants(),
        "forms": top.forms().iter().map(|f| [f.a, f.b, f.c]).collect::<Vec<_>>(),
        "divisors": divisors,
        "characters": characters,
    });
    let csv_rows = chars
        .iter()
        .map(|c| {
            let f = top.form(c.index);
            vec![c.index.to_string(), c.chi.order().to_string(), c.conductor.to_string(), format!("({}, {}, {})", f.a, f.b, f.c)]
        })
        .collect();
    Ok(Output {
        result,
        csv_header: vec!["index", "order", "conductor", "form_at_index"],
        csv_rows,
        tolerances: json!({}),
        failures: None,
    })
}

fn specs(forms: &[String]) -> Result<Vec<FormSpec>> {
    forms.iter().map(|s| FormSpec::parse(s)).collect()
}

struct Prepared {
    tensor: TensorProduct,
    setup: RankinSetup,
    afe: Afe,
}

fn afe_options(args: &SetupArgs) -> AfeOptions {
    AfeOptions { k: args.k, x: args.x, damping: args.damping, truncation: Truncation { a: args.trunc_a, b: args.trunc_b } }
}

fn prepare(args: &SetupArgs, extra_reach: u64) -> Result<Prepared> {
    let specs = specs(&args.forms)?;
    let provisional = load_tensor(&specs, PROVISIONAL_P_MAX)?;
    let order = QuadOrder::new(args.order.disc, args.order.conductor)?;
    let rule = match args.root_number_rule {
        Rule::Basechange => RootNumberRule::BaseChange,
        Rule::Supplied => RootNumberRule::Supplied,
    };
    let mut setup = RankinSetup::new(&provisional, order, rule)?;
    if let Some(c) = args.basechange_conductor {
        setup = setup.with_basechange_conductor(c)?;
    }
    let afe = Afe::new(&setup, afe_options(args))?;
    let needed = (afe.n_max(setup.y(order.c)) as u64).max(extra_reach).max(PROVISIONAL_P_MAX);
    let tensor = load_tensor(&specs, args.pmax.unwrap_or(needed))?;
    Ok(Prepared { tensor, setup, afe })
}

fn setup_json(p: &Prepared) -> Value {
    let s = &p.setup;
    json!({
        "label": s.label,
        "d_k": s.order.d_k,
        "c": s.order.c,
        "degree": s.degree,
        "weights": s.weights,
        "form_conductor": s.form_conductor,
        "basechange_conductor": s.basechange_conductor,
        "basechange_conductor_configured": s.basechange_configured,
        "root_number_rule": format!("{:?}", s.rule),
        "root_number": s.root_number,
        "generic_k": s.k,
        "k": p.afe.k,
        "forced_parity": p.afe.forced,
        "y_scale": s.y_scale(),
        "decay_point": p.afe.cutoff.decay_point(),
    })
}

fn tolerances(p: &Prepared) -> Value {
    let t: CutoffTolerances = p.afe.cutoff.tolerances;
    json!({
        "truncation_a": p.afe.truncation.a,
        "truncation_b": p.afe.truncation.b,
        "cutoff_y_min": t.y_min,
        "cutoff_y_max": t.y_max,
        "cutoff_nodes_per_decade": t.nodes_per_decade,
        "cutoff_panel_width": t.panel_width,
        "cutoff_truncation": t.truncation,
        "cutoff_max_panels": t.max_panels,
        "cutoff_decayed": t.decayed,
        "pole_threshold": POLE_THRESHOLD,
    })
}

pub fn central(args: &CentralArgs) -> Result<Output> {
    let p = prepare(&args.setup, 0)?;
    let family = RankinFamily::for_afes(&p.tensor, p.setup.clone(), &[&p.afe])?;
    let mut chars = family.characters();
    if let Some(i) = args.character {
        if i >= chars.len() {
            return Err(ringclass_core::Error::Domain(format!("character {i} out of range (h = {})", chars.len())).into());
        }
        chars = vec![chars.swap_remove(i)];
    }
    let values = chars.iter().map(|c| family.primitive_value(&p.afe, c)).collect::<std::result::Result<Vec<_>, _>>()?;
    let series = family.central_values(&p.afe, &chars)?;
    let (a, b) = (p.afe.truncation.a, p.afe.truncation.b);
    let rows: Vec<Value> = chars
        .iter()
        .zip(values.iter().zip(&series))
        .map(|(c, (v, f))| {
            json!({
                "character": c.index,
                "order": c.chi.order(),
                "conductor": v.conductor,
                "value": finite(v.value),
                "family_series_value": finite(f.value),
                "k": v.k,
                "Y": v.y,
                "root_number": v.root_number,
                "terms_used": v.terms_used,
                "n_max": v.n_max,
                "tail_estimate": finite(v.tail_estimate),
                "forced_parity": v.forced_parity,
                "truncation_a": a,
                "truncation_b": b,
            })
        })
        .collect();
    let csv_rows = chars
        .iter()
        .zip(values.iter().zip(&series))
        .map(|(c, (v, f))| {
            vec![
                c.index.to_string(),
                v.conductor.to_string(),
                num(v.value),
                num(f.value),
                v.k.to_string(),
                num(v.y),
                v.root_number.to_string(),
                v.terms_used.to_string(),
                v.n_max.to_string(),
                num(v.tail_estimate),
                num(a),
                num(b),
            ]
        })
        .collect();
    Ok(Output {
        result: json!({"setup": setup_json(&p), "values": rows}),
        csv_header: vec![
            "character", "conductor", "value", "family_series_value", "k", "Y", "root_number", "terms_used", "n_max", "tail_estimate", "truncation_a",
            "truncation_b",
        ],
        csv_rows,
        tolerances: tolerances(&p),
        failures: None,
    })
}

fn route_b_json(b: &RouteB) -> Value {
    json!({
        "variant": format!("{:?}", b.variant),
        "divisor_order": b.order,
        "D_leading": b.d_leading,
        "D_tilde_terms": b.d_tilde_terms.iter().map(|(d, v)| json!({"divisor": d, "value": v})).collect::<Vec<_>>(),
        "H": b.average,
    })
}

pub fn average(args: &AverageArgs) -> Result<Output> {
    let main_reach = if args.main_term { smoothing_reach(args.main_x) as u64 } else { 0 };
    let p = prepare(&args.setup, main_reach)?;
    let family = RankinFamily::for_afes(&p.tensor, p.setup.clone(), &[&p.afe])?;
    let c = p.setup.order.c;
    let (rows, route_a, primitive) = if args.route == RouteArg::B {
        (Vec::new(), None, None)
    } else {
        let a = average_route_a(&family, &p.afe)?;
        let prim = PrimitiveAverages::new(&family.tower, &a.per_character)?;
        let chars = family.characters();
        let rows: Vec<(usize, u64, f64)> = chars.iter().zip(&a.per_character).map(|(ch, v)| (ch.index, v.conductor, v.value)).collect();
        (rows, Some(a.average), Some(prim))
    };
    let route_b = if args.route == RouteArg::A {
        None
    } else {
        let order = match args.divisor_order {
            DivisorOrderArg::Ascending => DivisorOrder::Ascending,
            DivisorOrderArg::ByOmega => DivisorOrder::ByOmega,
        };
        Some(average_route_b(&family, &p.afe, RouteBVariant::Exact, order)?)
    };
    let h = route_a.or(route_b.as_ref().map(|b| b.average));
    let route_gap = match (route_a, &route_b) {
        (Some(a), Some(b)) => Some((a - b.average).abs()),
        _ => None,
    };
    let (main, inputs) = if args.main_term {
        let inputs = MainTermInputs::compute(&p.tensor, &p.setup, args.main_x)?;
        (Some(main_term(&inputs, p.afe.k, false)?), Some(inputs))
    } else {
        (None, None)
    };
    let residual = match (h, main) {
        (Some(h), Some(m)) => Some(h - m),
        _ => None,
    };
    let b0 = if args.b0_check { Some(b0_contour_check(&p.tensor, &p.setup, &p.afe)?) } else { None };
    let result = json!({
        "setup": setup_json(&p),
        "Y": p.setup.y(c),
        "per_character": rows.iter().map(|(i, cond, v)| json!({"character": i, "conductor": cond, "value": v})).collect::<Vec<_>>(),
        "H": h,
        "route_a": route_a,
        "route_b": route_b.as_ref().map(route_b_json),
        "route_gap": route_gap,
        "main_term": main,
        "residual": residual,
        "main_inputs": inputs.as_ref().map(|m| json!({
            "L_one": m.l_one,
            "L_log_derivative": m.l_log_derivative.value,
            "L_log_derivative_discrepancy": m.l_log_derivative.discrepancy(),
            "Z_one": m.square.value.value,
            "Z_residue": m.square.value.residue,
            "Z_prime_one": m.square.derivative.value,
            "sym2_at_one": m.sym2_at_one.value,
            "sym2_residue": m.sym2_at_one.residue,
            "sym2_pole": m.sym2_at_one.pole,
            "sym2_offset_s0": m.sym2_offset.s0,
            "sym2_offset_value": m.sym2_offset.value,
            "w": m.w,
            "arch_log_derivative": m.arch_log_derivative,
            "smoothing_x": m.square.value.x,
        })),
        "primitive": primitive.as_ref().map(|pr| json!({
            "divisors": pr.divisors,
            "class_numbers": pr.class_numbers,
            "primitive_counts": pr.primitive_counts,
            "averages": pr.averages,
            "primitive_mobius": pr.primitive_mobius,
            "primitive_direct": pr.primitive_direct,
            "round_trip_gap": pr.round_trip_gap(),
        })),
        "b0_check": b0.map(|b| json!({"direct": b.direct, "contour": b.contour, "gap": b.gap, "relative_gap": b.relative_gap})),
    });
    let (ta, tb) = (num(p.afe.truncation.a), num(p.afe.truncation.b));
    let mut csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|(i, cond, v)| vec!["character".into(), i.to_string(), cond.to_string(), num(*v), ta.clone(), tb.clone()])
        .collect();
    let mut footer = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            csv_rows.push(vec![name.into(), String::new(), String::new(), num(v), ta.clone(), tb.clone()]);
        }
    };
    footer("H", h);
    footer("route_b", route_b.as_ref().map(|b| b.average));
    footer("route_gap", route_gap);
    footer("main_term", main);
    footer("residual", residual);
    Ok(Output {
        result,
        csv_header: vec!["row", "character", "conductor", "value", "truncation_a", "truncation_b"],
        csv_rows,
        tolerances: tolerances(&p),
        failures: None,
    })
}

pub fn shifted(args: &ShiftedArgs) -> Result<Output> {
    let window = match args.window {
        WindowArg::Compact => Window::CompactBump,
        WindowArg::Gaussian => Window::GAUSSIAN,
    };
    if args.q.is_empty() || args.y.is_empty() {
        return Err(CliError::Usage("shifted needs at least one q and one Y".into()));
    }
    let reach = args
        .y
        .iter()
        .flat_map(|&y| args.q.iter().map(move |&q| shifted_reach(q, y, window)))
        .max()
        .unwrap_or(1);
    let tensor = load_tensor(&specs(&args.forms)?, args.pmax.unwrap_or(reach).max(2))?;
    let coefficients = tensor.coefficients(reach as usize)?;
    let mut grid = Vec::new();
    for &y in &args.y {
        for &q in &args.q {
            grid.push(shifted_sum(&coefficients, q, y, window)?);
        }
    }
    let spans = args.y.iter().cloned().fold(f64::INFINITY, f64::min) * 100.0
        <= args.y.iter().cloned().fold(0.0, f64::max);
    let fit = if args.q.len() >= 4 && args.y.len() >= 4 && spans {
        Some(exponent_fit(&coefficients, &args.q, &args.y, window)?)
    } else {
        None
    };
    let bound = BoundSlopes::best_known();
    let slope_json = |f: &ringclass_core::shifted::SlopeFit| json!({"fixed": f.fixed, "slope": f.slope, "residual": f.residual});
    let result = json!({
        "label": tensor.label(),
        "window": format!("{window:?}"),
        "negative_values_use_absolute_value": grid.iter().any(|g| g.negative_values),
        "grid": grid.iter().map(|g| json!({"Y": g.y, "q": g.q, "S": g.s, "S_normalized": g.s_normalized, "gamma_max": g.gamma_max})).collect::<Vec<_>>(),
        "bound_slopes": {"Y": bound.y, "q": bound.q, "Y_unnormalized": bound.y_unnormalized},
        "fit": fit.as_ref().map(|f| json!({
            "y_slopes": f.y_slopes.iter().map(slope_json).collect::<Vec<_>>(),
            "q_slopes": f.q_slopes.iter().map(slope_json).collect::<Vec<_>>(),
            "pooled_y_slope": f.pooled_y_slope,
            "max_y_slope": f.max_y_slope(),
            "max_q_slope": f.max_q_slope(),
            "doubling_ratio_median": f.doubling_ratio_median(),
        })),
    });
    let csv_rows = grid.iter().map(|g| vec![num(g.y), g.q.to_string(), num(g.s), num(g.s_normalized)]).collect();
    Ok(Output {
        result,
        csv_header: vec!["Y", "q", "S", "S_normalized"],
        csv_rows,
        tolerances: json!({"theta": ringclass_core::lseries::THETA, "delta": ringclass_core::lseries::DELTA}),
        failures: None,
    })
}

/// The exponent in the small-y bound for the given parameters, when one of
/// the three cases applies.
pub fn whittaker_bound_exponent(q: i32, nu: Complex64) -> Option<f64> {
    if nu.re == 0.0 {
        return Some(0.5);
    }
    if nu.im == 0.0 && nu.re > 0.0 && nu.re < 0.5 {
        return Some(0.5 - nu.re);
    }
    let j = (q as f64 - 1.0) / 2.0 - nu.re;
    if nu.im == 0.0 && nu.re > -0.5 && j >= 0.0 && j.fract() == 0.0 {
        return Some(0.5);
    }
    None
}

pub fn whittaker(args: &WhittakerArgs) -> Result<Output> {
    let nu = Complex64::new(args.nu_re, args.nu_im);
    let fit = whittaker_small_y_exponent(args.q, nu, args.y_lo, args.y_hi, args.samples)?;
    let expected = whittaker_bound_exponent(args.q, nu);
    let result = json!({
        "q": args.q,
        "nu": [nu.re, nu.im],
        "y_range": [args.y_lo, args.y_hi],
        "exponent": fit.exponent,
        "residual": fit.residual,
        "points": fit.points,
        "envelope": fit.envelope,
        "bound_exponent": expected,
    });
    let row = vec![
        args.q.to_string(),
        num(nu.re),
        num(nu.im),
        num(fit.exponent),
        expected.map(num).unwrap_or_default(),
        num(fit.residual),
    ];
    Ok(Output {
        result,
        csv_header: vec!["q", "nu_re", "nu_im", "exponent", "bound_exponent", "residual"],
        csv_rows: vec![row],
        tolerances: json!({"samples": args.samples}),
        failures: None,
    })
}

pub fn selftest() -> Result<Output> {
    let checks = crate::selftest::run_checks();
    let failures = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let result = json!({
        "checks": checks.iter().map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail})).collect::<Vec<_>>(),
        "failures": failures,
    });
    let csv_rows = checks.iter().map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]).collect();
    Ok(Output { result, csv_header: vec!["check", "passed", "detail"], csv_rows, tolerances: json!({}), failures: Some(failures) })
}
