use nalgebra::DVector;
use orbicone_core::curvature::{bracket_witness, fit_radial_exponent, ray_scan};
use orbicone_core::reflection::{chamber_complex, conjugacy_test, finite_extension_classify};
use orbicone_core::split::{canonical_split_form, is_split};
use orbicone_core::strata::{
    enumerate_strata, local_reduction, quotient_distance_torus, reduction_isometry_check,
    singular_set_from_strata, TorusDistanceOptions,
};
use orbicone_core::{Error, TorusAction};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::report;
use crate::spec::{ActionSpecFile, GroupSpecFile};

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub tol: f64,
    pub max_planes: usize,
}

fn action_summary(spec: &ActionSpecFile, action: &TorusAction) -> Value {
    json!({
        "k": spec.k,
        "n": spec.n,
        "f": spec.f,
        "m": action.ambient_dim(),
        "W": report::int_matrix(action.weights()),
        "kernel_factors": report::bigints(action.kernel_factors()),
        "faithful": action.is_faithful(),
    })
}

fn strata_section(action: &TorusAction, opts: &Options) -> Result<(Value, Value), CliError> {
    let strata = enumerate_strata(action, opts.max_planes)?;
    let b = singular_set_from_strata(action, &strata);
    Ok((
        Value::Array(strata.iter().map(report::stratum).collect()),
        report::singular_set(&b),
    ))
}

fn reduction_section(action: &TorusAction, spec: &ActionSpecFile) -> Result<Value, CliError> {
    let pair = local_reduction(action)?;
    let check = match &spec.pairs {
        Some(p) => Some(reduction_isometry_check(action, p.count, p.seed, &TorusDistanceOptions::default())?),
        None => None,
    };
    Ok(report::reduction(&pair, check.as_ref()))
}

pub fn analyze(spec: &ActionSpecFile, opts: &Options) -> Result<Value, CliError> {
    let extended = spec.extended(opts.tol)?;
    let action = extended.torus();
    let verdict = is_split(action);
    let (strata, singular) = strata_section(action, opts)?;
    let witness = if verdict.is_split {
        Value::Null
    } else {
        let w = bracket_witness(action)?;
        let sec = w.sectional_curvature(action).ok();
        report::witness(&w, sec)
    };
    let reduction = if verdict.is_split {
        reduction_section(action, spec)?
    } else {
        Value::Null
    };
    let finite = extended.finite_part();
    Ok(json!({
        "action": action_summary(spec, action),
        "split": report::split_verdict(&verdict),
        "canonical_split_form": report::canonical_split(&canonical_split_form(action.weights())),
        "strata": strata,
        "singular_set": singular,
        "curvature_witness": witness,
        "reduction": reduction,
        "finite_part": {
            "order": finite.order(),
            "origin_orbifold": finite_extension_classify(&extended).is_orbifold(),
        },
    }))
}

pub fn strata(spec: &ActionSpecFile, opts: &Options) -> Result<Value, CliError> {
    let action = spec.torus()?;
    let (strata, singular) = strata_section(&action, opts)?;
    Ok(json!({
        "action": action_summary(spec, &action),
        "strata": strata,
        "singular_set": singular,
    }))
}

pub fn reduce(spec: &ActionSpecFile) -> Result<Value, CliError> {
    let action = spec.torus()?;
    Ok(json!({
        "action": action_summary(spec, &action),
        "reduction": reduction_section(&action, spec)?,
    }))
}

/// CSV text, plus the error that interrupted the scan (already recorded as a row).
pub fn curvature(spec: &ActionSpecFile) -> Result<(String, Option<CliError>), CliError> {
    let action = spec.torus()?;
    let scan = spec
        .scan
        .as_ref()
        .ok_or_else(|| CliError::SpecInvalid("curvature needs a \"scan\" section".into()))?;
    let dir = DVector::from_column_slice(&scan.direction);
    let mut csv = String::from("radius,plane_index,sec,sec_times_r2\n");
    match ray_scan(&action, &dir, &scan.radii, scan.planes_per_point, scan.seed) {
        Ok(samples) => {
            for s in &samples {
                csv.push_str(&format!("{},{},{:e},{:e}\n", s.radius, s.plane_index, s.sec, s.sec_times_r2()));
            }
            match fit_radial_exponent(&samples) {
                Some(p) => csv.push_str(&format!("# fitted_exponent,{p:.6}\n")),
                None => csv.push_str("# fitted_exponent,undefined\n"),
            }
            Ok((csv, None))
        }
        Err(e) => {
            let name = match e {
                Error::SingularGram => "SingularGram",
                Error::DegeneratePlane => "DegeneratePlane",
                _ => return Err(e.into()),
            };
            csv.push_str(&format!("error,{name},,\n"));
            Ok((csv, Some(e.into())))
        }
    }
}

pub fn reflect(spec: &GroupSpecFile, opts: &Options) -> Result<Value, CliError> {
    let seed = spec
        .seed
        .ok_or_else(|| CliError::SpecInvalid("reflect needs a \"seed\"".into()))?;
    let group = spec.group(opts.tol)?;
    let c = chamber_complex(&group, seed)?;
    Ok(json!({"dim": spec.dim, "chamber_complex": report::chamber_complex(&c)}))
}

pub fn conjugacy(a: &GroupSpecFile, b: &GroupSpecFile, budget: usize, opts: &Options) -> Result<Value, CliError> {
    let g1 = a.group(opts.tol)?;
    let g2 = b.group(opts.tol)?;
    let result = conjugacy_test(&g1, &g2, budget);
    Ok(json!({
        "orders": [g1.order(), g2.order()],
        "budget": budget,
        "conjugacy": report::conjugacy(&result),
    }))
}

/// Distance in `Rᵐ / (T ⋊ F)`: the minimum over `g ∈ F` of the torus distance to `g·y`.
pub fn distance(
    spec: &ActionSpecFile,
    x: &DVector<f64>,
    y: &DVector<f64>,
    dopts: &TorusDistanceOptions,
    opts: &Options,
) -> Result<Value, CliError> {
    let extended = spec.extended(opts.tol)?;
    let mut best: Option<(f64, f64, usize)> = None;
    for (i, g) in extended.finite_part().elements().iter().enumerate() {
        let d = quotient_distance_torus(extended.torus(), x, &(g * y), dopts)?;
        if best.is_none_or(|(v, _, _)| d.value < v) {
            best = Some((d.value, d.gap, i));
        }
    }
    let (value, gap, element) = best.expect("groups contain the identity");
    Ok(json!({
        "x": report::vector(x),
        "y": report::vector(y),
        "distance": value,
        "gap": gap,
        "finite_element": element,
        "finite_order": extended.finite_part().order(),
    }))
}
