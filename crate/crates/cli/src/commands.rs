use serde::Serialize;
use serde_json::{json, Value};

use foliate::foliation::{
    baum_bott_target, singular_points, verify_baum_bott, verify_camacho_sad_line, LineSpec, Location, SingPoint,
    VectorField, DEFAULT_TOL,
};
use foliate::holonomy::{generator_product_check, holonomy_multiplier, IntegratorSettings};
use foliate::moduli::{
    darboux_family_scan, dimension_report, fiber_search, moduli_jacobian, moduli_vector, numerical_rank,
    to_regular_representative, FiberSearchConfig, PointLabel,
};
use foliate::{Error, Result, C64};

use crate::report::{cnum, num, LoggedError, Table};

/// A named input field, or the error that prevented building it.
pub struct Input {
    pub source: String,
    pub field: Result<VectorField>,
}

/// Everything a command contributes to the report.
#[derive(Default)]
pub struct Output {
    pub results: Vec<Value>,
    pub table: Table,
    pub errors: Vec<LoggedError>,
    pub failed_checks: usize,
    /// Number of units of work (inputs or grid members) attempted.
    pub attempted: usize,
}

impl Output {
    fn with_header(header: &[&str]) -> Output {
        Output {
            table: Table::new(header),
            ..Default::default()
        }
    }

    fn log(&mut self, source: &str, e: &Error) {
        self.errors.push(LoggedError::new(source, e));
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

/// Run `f` on every input, logging errors instead of stopping.
fn each_field<F>(inputs: &[Input], out: &mut Output, mut f: F)
where
    F: FnMut(&str, &VectorField, &mut Output) -> Result<()>,
{
    for input in inputs {
        out.attempted += 1;
        let res = match &input.field {
            Ok(v) => f(&input.source, v, out),
            Err(e) => Err(e.clone()),
        };
        if let Err(e) = res {
            out.log(&input.source, &e);
        }
    }
}

fn point_columns(p: &SingPoint) -> Vec<String> {
    let (kind, chart, a, b) = match p.location {
        Location::Finite { x, y } => ("finite", String::new(), x, y),
        Location::Infinite { chart, coord } => ("infinite", format!("{chart:?}"), C64::new(0.0, 0.0), coord),
    };
    let mut row = vec![kind.to_string(), chart];
    row.extend(cnum(a));
    row.extend(cnum(b));
    row.extend(cnum(p.lambda));
    row.extend(cnum(p.mu));
    for z in [p.char_ratio, p.nu] {
        match z {
            Some(z) => row.extend(cnum(z)),
            None => row.extend([String::new(), String::new()]),
        }
    }
    row.push(num(p.residual));
    row
}

pub fn singular(inputs: &[Input], tol: f64) -> Output {
    let mut out = Output::with_header(&[
        "source", "kind", "chart", "x_re", "x_im", "y_re", "y_im", "lambda_re", "lambda_im", "mu_re", "mu_im",
        "ratio_re", "ratio_im", "nu_re", "nu_im", "residual",
    ]);
    each_field(inputs, &mut out, |source, v, out| {
        let set = singular_points(v, tol)?;
        for p in set.iter() {
            let mut row = vec![source.to_string()];
            row.extend(point_columns(p));
            out.table.push(row);
        }
        let degenerate = set.iter().filter(|p| p.is_degenerate()).count();
        out.results.push(json!({
            "source": source,
            "degree": v.degree(),
            "expected": set.expected,
            "found": set.len(),
            "degenerate": degenerate,
            "infinite": to_value(&set.infinite),
            "finite": to_value(&set.finite),
        }));
        set.require_generic_count()?;
        set.require_nondegenerate()
    });
    out
}

pub fn indices(inputs: &[Input]) -> Output {
    let mut out = Output::with_header(&["source", "kind", "index", "nu_re", "nu_im"]);
    each_field(inputs, &mut out, |source, v, out| {
        let m = moduli_vector(v)?;
        for l in &m.labeled {
            let (kind, idx) = match l.label {
                PointLabel::Infinite(i) => ("infinite", i),
                PointLabel::Finite(i) => ("finite", i),
            };
            let mut row = vec![source.to_string(), kind.to_string(), idx.to_string()];
            row.extend(cnum(l.nu));
            out.table.push(row);
        }
        out.results.push(json!({
            "source": source,
            "moduli": to_value(&m),
            "sum": to_value(&m.sum()),
            "target": baum_bott_target(v.degree()),
        }));
        Ok(())
    });
    out
}

pub fn verify(inputs: &[Input], tol: f64) -> Output {
    let mut out = Output::with_header(&["source", "degree", "target", "bb_residual", "cs_residual", "pass"]);
    each_field(inputs, &mut out, |source, v, out| {
        let bb = verify_baum_bott(v, DEFAULT_TOL)?;
        let cs = verify_camacho_sad_line(v, &LineSpec::Infinity, DEFAULT_TOL)?;
        let pass = bb < tol && cs < tol;
        if !pass {
            out.failed_checks += 1;
        }
        let target = baum_bott_target(v.degree());
        out.table.push(vec![
            source.to_string(),
            v.degree().to_string(),
            num(target),
            num(bb),
            num(cs),
            pass.to_string(),
        ]);
        out.results.push(json!({
            "source": source,
            "degree": v.degree(),
            "target": target,
            "bb_residual": bb,
            "cs_residual": cs,
            "tol": tol,
            "pass": pass,
        }));
        Ok(())
    });
    out
}

pub fn rank(inputs: &[Input], step: f64, rel_tol: f64) -> Output {
    let mut header = vec!["source", "rank", "sigma_ratio", "radial_residual"];
    let sigma_names = ["sigma_1", "sigma_2", "sigma_3", "sigma_4", "sigma_5", "sigma_6"];
    header.extend(sigma_names);
    let mut out = Output::with_header(&header);
    each_field(inputs, &mut out, |source, v, out| {
        let (rep, map) = to_regular_representative(v)?;
        let mut report = moduli_jacobian(&rep, step)?;
        if report.rank > 0 {
            report.rank = numerical_rank(&report.singular_values, rel_tol);
        }
        let mut row = vec![
            source.to_string(),
            report.rank.to_string(),
            num(report.sigma_ratio),
            num(report.radial_residual),
        ];
        row.extend(report.singular_values.iter().map(|&s| num(s)));
        out.table.push(row);
        out.results.push(json!({
            "source": source,
            "representative": to_value(&rep),
            "affine_map": to_value(&map),
            "jacobian": to_value(&report),
        }));
        Ok(())
    });
    out
}

pub fn darboux_scan(alpha: C64, ks: &[C64]) -> Output {
    let mut out = Output::with_header(&[
        "k_re", "k_im", "rank", "k_direction_residual", "nu_k_derivative", "error",
    ]);
    out.attempted = ks.len();
    match darboux_family_scan(alpha, ks) {
        Ok(r) => {
            for m in &r.members {
                let mut row = cnum(m.k).to_vec();
                row.push(m.rank.map(|r| r.to_string()).unwrap_or_default());
                row.push(m.k_direction_residual.map(num).unwrap_or_default());
                row.push(m.nu_k_derivative.map(num).unwrap_or_default());
                row.push(m.error.clone().unwrap_or_default());
                out.table.push(row);
                if let Some(code) = &m.error {
                    out.errors.push(LoggedError {
                        source: format!("k = {}", m.k),
                        code: code.clone(),
                        message: format!("member skipped: {code}"),
                        degenerate: true,
                        rejected: true,
                    });
                }
            }
            out.results.push(to_value(&r));
        }
        Err(e) => out.log("scan", &e),
    }
    out
}

pub fn fiber(inputs: &[Input], mut cfg: FiberSearchConfig, random_starts: bool) -> Output {
    let mut header = vec!["source", "solution", "distance", "rank"];
    let names = [
        "p1_re", "p1_im", "p2_re", "p2_im", "p3_re", "p3_im", "q1_re", "q1_im", "q2_re", "q2_im", "q3_re", "q3_im",
    ];
    header.extend(names);
    let mut out = Output::with_header(&header);
    each_field(inputs, &mut out, |source, v, out| {
        let target = moduli_vector(v)?;
        cfg.start = if random_starts { None } else { Some(to_regular_representative(v)?.0) };
        let report = fiber_search(&target, &cfg)?;
        for (i, s) in report.solutions.iter().enumerate() {
            let mut row = vec![source.to_string(), i.to_string(), num(s.distance), s.rank.to_string()];
            for z in s.rep.coeffs() {
                row.extend(cnum(z));
            }
            out.table.push(row);
        }
        out.results.push(json!({
            "source": source,
            "target": to_value(&target),
            "config": to_value(&cfg),
            "search": to_value(&report),
        }));
        Ok(())
    });
    out
}

pub fn holonomy(inputs: &[Input], point: Option<usize>, settings: IntegratorSettings) -> Output {
    let mut out = Output::with_header(&[
        "source", "point", "ratio_re", "ratio_im", "expected_re", "expected_im", "estimate_re", "estimate_im",
        "error",
    ]);
    each_field(inputs, &mut out, |source, v, out| {
        let points: Vec<usize> = match point {
            Some(j) => vec![j],
            None => (0..v.degree() + 1).collect(),
        };
        let mut multipliers = Vec::new();
        for j in points {
            match holonomy_multiplier(v, j, &[], settings) {
                Ok(r) => {
                    let mut row = vec![source.to_string(), j.to_string()];
                    row.extend(cnum(r.ratio));
                    row.extend(cnum(r.expected));
                    row.extend(cnum(r.estimate));
                    row.push(num(r.error));
                    out.table.push(row);
                    multipliers.push(to_value(&r));
                }
                Err(e) => {
                    out.log(&format!("{source} point {j}"), &e);
                    multipliers.push(json!({ "index": j, "error": e.code() }));
                }
            }
        }
        let samples = [C64::new(0.0, 0.0), C64::new(1e-4, 0.0), C64::new(0.0, 1e-4)];
        let product = match generator_product_check(v, None, &samples, settings) {
            Ok(p) => {
                let mut row = vec![source.to_string(), "product".to_string()];
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(num(p.residual));
                out.table.push(row);
                to_value(&p)
            }
            Err(e) => {
                out.log(&format!("{source} product"), &e);
                json!({ "error": e.code() })
            }
        };
        out.results.push(json!({
            "source": source,
            "multipliers": multipliers,
            "product": product,
        }));
        Ok(())
    });
    out
}

pub fn dims(degrees: &[usize]) -> Output {
    let mut out = Output::with_header(&["degree", "source", "target_bound", "gap"]);
    for &n in degrees {
        out.attempted += 1;
        match dimension_report(n) {
            Ok(d) => {
                out.table.push(vec![
                    n.to_string(),
                    d.source.to_string(),
                    d.target_bound.to_string(),
                    d.gap.to_string(),
                ]);
                out.results.push(json!({ "degree": n, "dimensions": to_value(&d) }));
            }
            Err(e) => out.log(&format!("degree {n}"), &e),
        }
    }
    out
}
