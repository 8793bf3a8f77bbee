//! JSON rendering of core results.
//!
//! Reports are `{"report": …, "metadata": …}`. Everything under `report` is a
//! function of the input bytes, the seeds in them and the tool version; timing
//! lives under `metadata` together with the SHA-256 of the serialized report.

use std::time::Duration;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use orbicone_core::curvature::{BracketWitness, WitnessField};
use orbicone_core::lattice::IntMatrix;
use orbicone_core::reflection::{ChamberComplex, Conjugacy, NonConjugacyReason};
use orbicone_core::split::{CanonicalSplit, PlaneCertificate, SplitVerdict};
use orbicone_core::strata::{
    classify_stratum, IsometryReport, ReductionPair, SingularSetDimension, Stratum, StratumClass,
};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::spec::hex;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn envelope(command: &str, input_sha256: &str, mut body: Value, elapsed: Duration) -> Value {
    if let Value::Object(map) = &mut body {
        map.insert("command".into(), json!(command));
        map.insert("tool_version".into(), json!(TOOL_VERSION));
        map.insert("input_sha256".into(), json!(input_sha256));
    }
    let stable = serde_json::to_vec(&body).expect("report serializes");
    json!({
        "report": body,
        "metadata": {
            "elapsed_ms": elapsed.as_secs_f64() * 1e3,
            "report_sha256": hex(&Sha256::digest(&stable)),
        }
    })
}

pub fn bigint(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn bigints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(bigint).collect())
}

pub fn int_matrix(a: &IntMatrix) -> Value {
    Value::Array((0..a.rows()).map(|r| bigints(a.row(r))).collect())
}

pub fn vector(v: &DVector<f64>) -> Value {
    json!(v.iter().copied().collect::<Vec<f64>>())
}

pub fn matrix(a: &DMatrix<f64>) -> Value {
    json!((0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)]).collect::<Vec<f64>>())
        .collect::<Vec<_>>())
}

pub fn split_verdict(v: &SplitVerdict) -> Value {
    let planes: Vec<Value> = v
        .per_plane
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            PlaneCertificate::FixedPlane => json!({"plane": i, "certificate": "fixed_plane"}),
            PlaneCertificate::Circle(c) => json!({"plane": i, "certificate": "circle", "circle": bigints(c)}),
            PlaneCertificate::NoCircle => json!({"plane": i, "certificate": "no_circle"}),
        })
        .collect();
    json!({"is_split": v.is_split, "per_plane": planes})
}

pub fn canonical_split(c: &CanonicalSplit) -> Value {
    match c {
        CanonicalSplit::Split { transform, decoupled, planes } => json!({
            "transform": int_matrix(transform),
            "transform_determinant": bigint(&transform.determinant()),
            "decoupled": int_matrix(decoupled),
            "planes": planes,
        }),
        CanonicalSplit::NonSplit { plane } => json!({"non_split_plane": plane}),
    }
}

pub fn stratum(s: &Stratum) -> Value {
    let class = classify_stratum(s);
    let (verdict, witness) = match class {
        StratumClass::Orbifold => ("orbifold", Value::Null),
        StratumClass::NonOrbifold { plane } => ("non_orbifold", json!(plane)),
    };
    json!({
        "pattern": s.pattern,
        "dim_in_total": s.dim_in_total,
        "dim_in_quotient": s.dim_in_quotient,
        "isotropy": {
            "dim": s.isotropy.dim,
            "invariant_factors": bigints(&s.isotropy.invariant_factors),
            "finite_order": bigint(&s.isotropy.finite_order()),
            "slice_weight_matrix": int_matrix(&s.isotropy.slice_weights),
        },
        "verdict": verdict,
        "witness_plane": witness,
    })
}

pub fn singular_set(b: &SingularSetDimension) -> Value {
    json!({"dim_b": b.dim, "bound": b.bound, "satisfied": b.satisfied})
}

pub fn witness(w: &BracketWitness, sec: Option<f64>) -> Value {
    json!({
        "plane": w.plane,
        "partner": w.partner,
        "field": match w.field { WitnessField::XPair => "x_pair", WitnessField::YPair => "y_pair" },
        "point": vector(&w.point),
        "v": vector(&w.v),
        "w": vector(&w.w),
        "lambda": w.lambda,
        "value": w.value,
        "inner_product": w.inner_product,
        "closed_form": w.closed_form,
        "candidates": w.candidates,
        "projection_extension_value": w.projection_extension_value,
        "lambda_in_unit_interval": w.lambda_in_unit_interval(),
        "sectional_curvature": sec,
    })
}

pub fn reduction(pair: &ReductionPair, check: Option<&IsometryReport>) -> Value {
    let axes: Vec<usize> = pair
        .subspace_basis
        .iter()
        .filter_map(|e| e.iter().position(|&t| t == 1.0))
        .collect();
    json!({
        "subspace_axes": axes,
        "rotated_planes": pair.rotated_planes,
        "gamma_order": pair.gamma.order(),
        "gamma": pair.gamma.elements().iter().map(matrix).collect::<Vec<_>>(),
        "isometry_check": check.map(|r| json!({
            "pairs": r.pairs,
            "max_deviation": r.max_deviation,
            "max_gap": r.max_gap,
        })),
    })
}

pub fn chamber_complex(c: &ChamberComplex) -> Value {
    json!({
        "order": c.group.order(),
        "reflections": c.reflections.iter().map(|r| json!({"index": r.index, "normal": vector(&r.normal)})).collect::<Vec<_>>(),
        "reflection_group_order": c.reflection_group.order(),
        "chamber_rep": vector(&c.chamber_rep),
        "chamber_count": c.chamber_count,
        "codim2_count": c.codim2_count,
        "quotient_order": c.quotient_order(),
    })
}

pub fn conjugacy(c: &Conjugacy) -> Value {
    match c {
        Conjugacy::Conjugate { conjugator, pairing, residual } => json!({
            "status": "conjugate",
            "conjugator": matrix(conjugator),
            "pairing": pairing,
            "residual": residual,
        }),
        Conjugacy::NotConjugate(reason) => json!({
            "status": "not_conjugate",
            "reason": match reason {
                NonConjugacyReason::Dimension => "dimension",
                NonConjugacyReason::Order => "order",
                NonConjugacyReason::ClassInvariants => "class_invariants",
                NonConjugacyReason::NoCharacterIsomorphism => "no_character_isomorphism",
            },
        }),
        Conjugacy::Inconclusive { explored } => json!({"status": "inconclusive", "explored": explored}),
    }
}
