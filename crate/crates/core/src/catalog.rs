//! Catalog of immersions with known geometry.
//!
//! Each entry bundles a chart with exact derivative jets, its ambient model,
//! adjustable parameters with committed defaults and ranges, and the expected
//! classification where the geometry pins one down. Entries whose names start
//! with `perturbed-` carry seeded trigonometric noise and exist to exercise
//! the structural identities on immersions with no special structure; they
//! claim no expected classification.
//!
//! Domains are deliberately narrow. The identity checks difference
//! component fields across the charts, and the committed widths keep the
//! default-step truncation error of every second derivative below 1e-7.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::ambient::AmbientModel;
use crate::analysis::RecurrenceStatus;
use crate::error::{GeomError, Result};
use crate::jets::ImmersionChart;
use crate::taylor::Taylor3;

/// One adjustable parameter of a catalog entry.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub min: f64,
    pub max: f64,
}

/// Static description of a catalog entry, for listings.
#[derive(Debug, Clone, Serialize)]
pub struct EntryInfo {
    pub id: &'static str,
    pub description: &'static str,
    pub dim: usize,
    pub ambient_dim: usize,
    pub curvature: f64,
    pub hypersurface: bool,
    pub product_adapted: bool,
    pub expected_status: Option<String>,
    pub expected_dim_first_normal: Option<usize>,
    pub params: Vec<ParamSpec>,
}

/// An instantiated catalog entry ready for evaluation.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: String,
    pub description: String,
    pub ambient: AmbientModel,
    pub chart: ImmersionChart,
    /// Expected classification at every interior point, when the geometry
    /// forces one. Only meaningful for the committed default parameters.
    pub expected_status: Option<RecurrenceStatus>,
    pub expected_dim_first_normal: Option<usize>,
    pub product_adapted: bool,
    pub hypersurface: bool,
    /// Resolved parameter values, defaults merged with overrides.
    pub params: BTreeMap<String, f64>,
    /// Whether the entry was built purely from defaults.
    pub default_params: bool,
}

struct Spec {
    id: &'static str,
    description: &'static str,
    dim: usize,
    ambient_dim: usize,
    curvature: f64,
    hypersurface: bool,
    product_adapted: bool,
    expected_status: Option<RecurrenceStatus>,
    expected_dim_first_normal: Option<usize>,
    params: &'static [ParamSpec],
    build: fn(&BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)>,
}

const NO_PARAMS: &[ParamSpec] = &[];

const SPHERE_PARAMS: &[ParamSpec] = &[ParamSpec {
    name: "radius",
    default: 1.0,
    min: 0.2,
    max: 1.5,
}];

const ELLIPSOID_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "ax",
        default: 1.0,
        min: 0.2,
        max: 2.0,
    },
    ParamSpec {
        name: "ay",
        default: 1.0,
        min: 0.2,
        max: 2.0,
    },
    ParamSpec {
        name: "az",
        default: 1.5,
        min: 0.2,
        max: 2.0,
    },
];

const SMALL_SPHERE_PARAMS: &[ParamSpec] = &[ParamSpec {
    name: "alpha",
    default: 0.7,
    min: 0.2,
    max: 1.35,
}];

const EQUIDISTANT_PARAMS: &[ParamSpec] = &[ParamSpec {
    name: "offset",
    default: 0.3,
    min: 0.05,
    max: 2.0,
}];

const PERTURBED_PARAMS: &[ParamSpec] = &[
    ParamSpec {
        name: "seed",
        default: 7.0,
        min: 0.0,
        max: 4294967295.0,
    },
    ParamSpec {
        name: "amp",
        default: 0.05,
        min: 0.0,
        max: 0.2,
    },
];

fn seeded_coeffs(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Orthonormalize integer seed columns into a fixed rotation-style embedding.
fn orthonormal_columns(raw: &[&[f64]]) -> Vec<Vec<f64>> {
    let m = raw[0].len();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for r in raw {
        let mut v = r.to_vec();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for i in 0..m {
                v[i] -= dot * c[i];
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        cols.push(v);
    }
    cols
}

/// Parabolic cylinder with a stretched straight ruling; the ruling speed
/// varies with v so finite differences of the chart see genuine curvature
/// in every axis while the surface stays an orthogonal product.
fn parabolic_cylinder_components(uv: &[Taylor3]) -> Vec<Taylor3> {
    let (u, v) = (&uv[0], &uv[1]);
    vec![
        u.clone(),
        u.mul(u).scale(0.5),
        v.scale(0.5).sinh().scale(2.0),
    ]
}

const PARABOLIC_DOMAIN: [[f64; 2]; 2] = [[-1.75, 1.85], [-0.3, 1.3]];

fn build_cylinder_parabola(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(0.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, PARABOLIC_DOMAIN.to_vec(), 3, |uv| {
        parabolic_cylinder_components(uv)
    })?;
    Ok((ambient, chart))
}

fn build_rotated_parabola(model_dim: usize, cols: Vec<Vec<f64>>) -> Result<ImmersionChart> {
    ImmersionChart::from_taylor(2, PARABOLIC_DOMAIN.to_vec(), model_dim, move |uv| {
        let base = parabolic_cylinder_components(uv);
        (0..model_dim)
            .map(|a| {
                let mut acc = Taylor3::constant(2, 0.0);
                for (k, col) in cols.iter().enumerate() {
                    acc = acc.add(&base[k].scale(col[a]));
                }
                acc
            })
            .collect()
    })
}

fn build_cylinder_parabola_e4(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(0.0, 4)?;
    let cols = orthonormal_columns(&[
        &[2.0, 1.0, 0.0, -1.0],
        &[0.0, 1.0, 1.0, 1.0],
        &[1.0, -1.0, 2.0, 0.0],
    ]);
    Ok((ambient, build_rotated_parabola(4, cols)?))
}

fn build_cylinder_parabola_e5(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(0.0, 5)?;
    let cols = orthonormal_columns(&[
        &[1.0, 2.0, 0.0, -1.0, 1.0],
        &[1.0, 0.0, 1.0, 1.0, 0.0],
        &[0.0, 1.0, -1.0, 1.0, 2.0],
    ]);
    Ok((ambient, build_rotated_parabola(5, cols)?))
}

fn build_cylinder_circular(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(0.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[0.2, 1.0], [-0.5, 0.5]], 3, |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![u.cos(), u.sin(), v.clone()]
    })?;
    Ok((ambient, chart))
}

fn build_plane(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(0.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[-1.0, 1.0], [-1.0, 1.0]], 3, |uv| {
        vec![uv[0].clone(), uv[1].clone(), Taylor3::constant(2, 0.0)]
    })?;
    Ok((ambient, chart))
}

fn build_sphere_round(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let r = p["radius"];
    let ambient = AmbientModel::new(0.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[-0.45, 0.45], [0.3, 1.2]], 3, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cos().mul(&v.cos()).scale(r),
            u.cos().mul(&v.sin()).scale(r),
            u.sin().scale(r),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_ellipsoid(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let (ax, ay, az) = (p["ax"], p["ay"], p["az"]);
    let ambient = AmbientModel::new(0.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[0.15, 0.95], [0.3, 1.1]], 3, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cos().mul(&v.cos()).scale(ax),
            u.cos().mul(&v.sin()).scale(ay),
            u.sin().scale(az),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_clifford_torus(_: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(1.0, 3)?;
    let s = 0.5_f64.sqrt();
    let chart = ImmersionChart::from_taylor(2, vec![[0.2, 1.0], [0.2, 1.0]], 4, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cos().scale(s),
            u.sin().scale(s),
            v.cos().scale(s),
            v.sin().scale(s),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_small_sphere(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let alpha = p["alpha"];
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let ambient = AmbientModel::new(1.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[-0.45, 0.45], [0.3, 1.2]], 4, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cos().mul(&v.cos()).scale(sa),
            u.cos().mul(&v.sin()).scale(sa),
            u.sin().scale(sa),
            Taylor3::constant(2, ca),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_hyperbolic_geodesic_plane(
    _: &BTreeMap<String, f64>,
) -> Result<(AmbientModel, ImmersionChart)> {
    let ambient = AmbientModel::new(-1.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[-0.4, 0.4], [-0.4, 0.4]], 4, |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cosh().mul(&v.cosh()),
            u.sinh().mul(&v.cosh()),
            v.sinh(),
            Taylor3::constant(2, 0.0),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_hyperbolic_equidistant(
    p: &BTreeMap<String, f64>,
) -> Result<(AmbientModel, ImmersionChart)> {
    let s = p["offset"];
    let w = (1.0 + s * s).sqrt();
    let ambient = AmbientModel::new(-1.0, 3)?;
    let chart = ImmersionChart::from_taylor(2, vec![[-0.4, 0.4], [-0.4, 0.4]], 4, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        vec![
            u.cosh().mul(&v.cosh()).scale(w),
            u.sinh().mul(&v.cosh()).scale(w),
            v.sinh().scale(w),
            Taylor3::constant(2, s),
        ]
    })?;
    Ok((ambient, chart))
}

fn build_perturbed_torus_e4(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let seed = p["seed"] as u64;
    let amp = p["amp"];
    let c = seeded_coeffs(seed, 8);
    let ambient = AmbientModel::new(0.0, 4)?;
    let chart = ImmersionChart::from_taylor(2, vec![[0.3, 1.0], [0.3, 1.0]], 4, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        let su_cv = u.sin().mul(&v.cos());
        let cu_sv = u.cos().mul(&v.sin());
        let base = [
            u.cos(),
            u.sin(),
            v.cos().scale(0.8),
            v.sin().scale(0.8),
        ];
        base.iter()
            .enumerate()
            .map(|(a, x)| {
                x.add(&su_cv.scale(amp * c[2 * a]))
                    .add(&cu_sv.scale(amp * c[2 * a + 1]))
            })
            .collect()
    })?;
    Ok((ambient, chart))
}

/// Nested spherical angles, two of them the chart coordinates and the rest
/// seeded functions, so the image stays exactly on the unit sphere.
fn build_perturbed_graph_s4(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let seed = p["seed"] as u64;
    let amp = p["amp"];
    let c = seeded_coeffs(seed, 6);
    let ambient = AmbientModel::new(1.0, 4)?;
    let chart = ImmersionChart::from_taylor(2, vec![[0.3, 1.0], [0.3, 1.0]], 5, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        let wobble = |k: usize| -> Taylor3 {
            u.sin()
                .mul(&v.cos())
                .scale(c[k])
                .add(&u.cos().mul(&v.sin()).scale(c[k + 1]))
                .add(&u.sin().mul(&v.sin()).scale(c[k + 2]))
        };
        let phi1 = wobble(0).scale(amp).shift(0.9);
        let phi2 = u.clone();
        let phi3 = wobble(3).scale(amp).shift(0.8);
        let phi4 = v.clone();
        let s1 = phi1.sin();
        let s12 = s1.mul(&phi2.sin());
        let s123 = s12.mul(&phi3.sin());
        vec![
            phi1.cos(),
            s1.mul(&phi2.cos()),
            s12.mul(&phi3.cos()),
            s123.mul(&phi4.cos()),
            s123.mul(&phi4.sin()),
        ]
    })?;
    Ok((ambient, chart))
}

/// Radial graph over nested angles of the unit pseudosphere; the hyperbolic
/// identity keeps the image exactly on the model.
fn build_perturbed_graph_h4(p: &BTreeMap<String, f64>) -> Result<(AmbientModel, ImmersionChart)> {
    let seed = p["seed"] as u64;
    let amp = p["amp"];
    let c = seeded_coeffs(seed, 6);
    let ambient = AmbientModel::new(-1.0, 4)?;
    let chart = ImmersionChart::from_taylor(2, vec![[0.3, 1.0], [0.3, 1.0]], 5, move |uv| {
        let (u, v) = (&uv[0], &uv[1]);
        let wobble = |k: usize| -> Taylor3 {
            u.sin()
                .mul(&v.cos())
                .scale(c[k])
                .add(&u.cos().mul(&v.sin()).scale(c[k + 1]))
                .add(&u.sin().mul(&v.sin()).scale(c[k + 2]))
        };
        let rho = wobble(0).scale(amp).shift(0.7);
        let psi1 = u.clone();
        let psi2 = wobble(3).scale(amp).shift(0.9);
        let psi3 = v.clone();
        let sr = rho.sinh();
        let s1 = sr.mul(&psi1.sin());
        let s12 = s1.mul(&psi2.sin());
        vec![
            rho.cosh(),
            sr.mul(&psi1.cos()),
            s1.mul(&psi2.cos()),
            s12.mul(&psi3.cos()),
            s12.mul(&psi3.sin()),
        ]
    })?;
    Ok((ambient, chart))
}

const SPECS: &[Spec] = &[
    Spec {
        id: "cylinder-parabola",
        description: "Parabolic cylinder in flat 3-space with a stretched ruling: \
                      recurrent but not parallel second fundamental form",
        dim: 2,
        ambient_dim: 3,
        curvature: 0.0,
        hypersurface: true,
        product_adapted: true,
        expected_status: Some(RecurrenceStatus::RecurrentNonparallel),
        expected_dim_first_normal: Some(1),
        params: NO_PARAMS,
        build: build_cylinder_parabola,
    },
    Spec {
        id: "cylinder-parabola-e4",
        description: "The parabolic cylinder embedded in flat 4-space by a fixed \
                      rotation: same geometry, codimension two",
        dim: 2,
        ambient_dim: 4,
        curvature: 0.0,
        hypersurface: false,
        product_adapted: true,
        expected_status: Some(RecurrenceStatus::RecurrentNonparallel),
        expected_dim_first_normal: Some(1),
        params: NO_PARAMS,
        build: build_cylinder_parabola_e4,
    },
    Spec {
        id: "cylinder-parabola-e5",
        description: "The parabolic cylinder embedded in flat 5-space by a fixed \
                      rotation: target for the span-reduction check",
        dim: 2,
        ambient_dim: 5,
        curvature: 0.0,
        hypersurface: false,
        product_adapted: true,
        expected_status: Some(RecurrenceStatus::RecurrentNonparallel),
        expected_dim_first_normal: Some(1),
        params: NO_PARAMS,
        build: build_cylinder_parabola_e5,
    },
    Spec {
        id: "cylinder-circular",
        description: "Circular cylinder: parallel nonzero second fundamental form, \
                      orthogonal metric product",
        dim: 2,
        ambient_dim: 3,
        curvature: 0.0,
        hypersurface: true,
        product_adapted: true,
        expected_status: Some(RecurrenceStatus::Parallel),
        expected_dim_first_normal: Some(1),
        params: NO_PARAMS,
        build: build_cylinder_circular,
    },
    Spec {
        id: "plane",
        description: "Affine plane: totally geodesic, vanishing second fundamental form",
        dim: 2,
        ambient_dim: 3,
        curvature: 0.0,
        hypersurface: true,
        product_adapted: true,
        expected_status: Some(RecurrenceStatus::BZero),
        expected_dim_first_normal: Some(0),
        params: NO_PARAMS,
        build: build_plane,
    },
    Spec {
        id: "sphere-round",
        description: "Round sphere of adjustable radius: umbilic, parallel",
        dim: 2,
        ambient_dim: 3,
        curvature: 0.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::Parallel),
        expected_dim_first_normal: Some(1),
        params: SPHERE_PARAMS,
        build: build_sphere_round,
    },
    Spec {
        id: "ellipsoid",
        description: "Triaxial ellipsoid: generic hypersurface fitting no recurrence \
                      relation",
        dim: 2,
        ambient_dim: 3,
        curvature: 0.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::NotRecurrent),
        expected_dim_first_normal: Some(1),
        params: ELLIPSOID_PARAMS,
        build: build_ellipsoid,
    },
    Spec {
        id: "clifford-torus",
        description: "Minimal flat torus in the unit 3-sphere: parallel second \
                      fundamental form, vanishing mean curvature",
        dim: 2,
        ambient_dim: 3,
        curvature: 1.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::Parallel),
        expected_dim_first_normal: Some(1),
        params: NO_PARAMS,
        build: build_clifford_torus,
    },
    Spec {
        id: "sphere-small-in-s3",
        description: "Small sphere at fixed latitude of the unit 3-sphere: umbilic, \
                      parallel",
        dim: 2,
        ambient_dim: 3,
        curvature: 1.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::Parallel),
        expected_dim_first_normal: Some(1),
        params: SMALL_SPHERE_PARAMS,
        build: build_small_sphere,
    },
    Spec {
        id: "hyperbolic-geodesic-plane",
        description: "Totally geodesic plane in hyperbolic 3-space",
        dim: 2,
        ambient_dim: 3,
        curvature: -1.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::BZero),
        expected_dim_first_normal: Some(0),
        params: NO_PARAMS,
        build: build_hyperbolic_geodesic_plane,
    },
    Spec {
        id: "hyperbolic-equidistant",
        description: "Equidistant surface over a geodesic plane in hyperbolic \
                      3-space: umbilic, parallel",
        dim: 2,
        ambient_dim: 3,
        curvature: -1.0,
        hypersurface: true,
        product_adapted: false,
        expected_status: Some(RecurrenceStatus::Parallel),
        expected_dim_first_normal: Some(1),
        params: EQUIDISTANT_PARAMS,
        build: build_hyperbolic_equidistant,
    },
    Spec {
        id: "perturbed-torus-e4",
        description: "Flat torus in 4-space with seeded trigonometric noise: \
                      generic codimension-two identity fodder",
        dim: 2,
        ambient_dim: 4,
        curvature: 0.0,
        hypersurface: false,
        product_adapted: false,
        expected_status: None,
        expected_dim_first_normal: None,
        params: PERTURBED_PARAMS,
        build: build_perturbed_torus_e4,
    },
    Spec {
        id: "perturbed-graph-s4",
        description: "Seeded angular graph in the unit 4-sphere: generic surface in \
                      a positively curved ambient",
        dim: 2,
        ambient_dim: 4,
        curvature: 1.0,
        hypersurface: false,
        product_adapted: false,
        expected_status: None,
        expected_dim_first_normal: None,
        params: PERTURBED_PARAMS,
        build: build_perturbed_graph_s4,
    },
    Spec {
        id: "perturbed-graph-h4",
        description: "Seeded radial graph in hyperbolic 4-space: generic surface in \
                      a negatively curved ambient",
        dim: 2,
        ambient_dim: 4,
        curvature: -1.0,
        hypersurface: false,
        product_adapted: false,
        expected_status: None,
        expected_dim_first_normal: None,
        params: PERTURBED_PARAMS,
        build: build_perturbed_graph_h4,
    },
];

/// Identifiers of all catalog entries, in listing order.
pub fn entry_ids() -> Vec<&'static str> {
    SPECS.iter().map(|s| s.id).collect()
}

/// Static descriptions for listings.
pub fn list_entries() -> Vec<EntryInfo> {
    SPECS
        .iter()
        .map(|s| EntryInfo {
            id: s.id,
            description: s.description,
            dim: s.dim,
            ambient_dim: s.ambient_dim,
            curvature: s.curvature,
            hypersurface: s.hypersurface,
            product_adapted: s.product_adapted,
            expected_status: s.expected_status.map(|x| x.to_string()),
            expected_dim_first_normal: s.expected_dim_first_normal,
            params: s.params.to_vec(),
        })
        .collect()
}

/// Build an entry with the given parameter overrides.
pub fn instantiate(id: &str, overrides: &BTreeMap<String, f64>) -> Result<CatalogEntry> {
    let spec = SPECS
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| GeomError::UnknownEntry(id.to_string()))?;
    let mut params = BTreeMap::new();
    for ps in spec.params {
        params.insert(ps.name.to_string(), ps.default);
    }
    for (name, &value) in overrides {
        let ps = spec
            .params
            .iter()
            .find(|ps| ps.name == name)
            .ok_or_else(|| {
                GeomError::Config(format!(
                    "entry {id} has no parameter {name}; available: {}",
                    if spec.params.is_empty() {
                        "none".to_string()
                    } else {
                        spec.params
                            .iter()
                            .map(|p| p.name)
                            .collect::<Vec<_>>()
                            .join(", ")
                    }
                ))
            })?;
        if !value.is_finite() || value < ps.min || value > ps.max {
            return Err(GeomError::ParamOutOfRange {
                name: name.clone(),
                value,
            });
        }
        params.insert(name.clone(), value);
    }
    let (ambient, chart) = (spec.build)(&params)?;
    Ok(CatalogEntry {
        id: spec.id.to_string(),
        description: spec.description.to_string(),
        ambient,
        chart,
        expected_status: spec.expected_status,
        expected_dim_first_normal: spec.expected_dim_first_normal,
        product_adapted: spec.product_adapted,
        hypersurface: spec.hypersurface,
        params,
        default_params: overrides.is_empty(),
    })
}

/// Build an entry with its committed defaults.
pub fn default_entry(id: &str) -> Result<CatalogEntry> {
    instantiate(id, &BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::Grid;
    use crate::jets::{eval_jet3, max_jet_errors, Step};

    #[test]
    fn listing_is_stable_and_complete() {
        let ids = entry_ids();
        assert_eq!(ids.len(), 14);
        assert_eq!(ids[0], "cylinder-parabola");
        let infos = list_entries();
        assert_eq!(infos.len(), ids.len());
        for (info, id) in infos.iter().zip(&ids) {
            assert_eq!(info.id, *id);
            assert_eq!(info.dim, 2);
        }
    }

    #[test]
    fn every_entry_instantiates_and_sits_on_its_model() {
        for id in entry_ids() {
            let entry = default_entry(id).unwrap();
            assert!(entry.default_params);
            let grid = Grid::interior(&entry.chart, &[3, 3]).unwrap();
            for u in grid.points() {
                let x = entry.chart.eval(&u).unwrap();
                let res = entry.ambient.on_model_residual(&x).unwrap();
                assert!(res <= 1e-9, "{id} off model by {res} at {u:?}");
            }
        }
    }

    #[test]
    fn exact_jets_agree_with_finite_differences_on_every_entry() {
        for id in entry_ids() {
            let entry = default_entry(id).unwrap();
            let grid = Grid::interior(&entry.chart, &[3, 3]).unwrap();
            let fd_chart = entry.chart.without_exact_jet();
            let u = &grid.points()[4];
            let exact = eval_jet3(&entry.chart, u, Step::Auto).unwrap();
            let fd = eval_jet3(&fd_chart, u, Step::Auto).unwrap();
            let (e1, e2, e3) = max_jet_errors(&exact, &fd);
            assert!(e1 <= 1e-6, "{id}: first-derivative gap {e1}");
            assert!(e2 <= 1e-7, "{id}: second-derivative gap {e2}");
            assert!(e3 <= 1e-4, "{id}: third-derivative gap {e3}");
        }
    }

    #[test]
    fn rotated_embeddings_preserve_the_metric() {
        let base = default_entry("cylinder-parabola").unwrap();
        for id in ["cylinder-parabola-e4", "cylinder-parabola-e5"] {
            let entry = default_entry(id).unwrap();
            let u = [0.6, 0.4];
            let jb = eval_jet3(&base.chart, &u, Step::Auto).unwrap();
            let jr = eval_jet3(&entry.chart, &u, Step::Auto).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let gb = jb.d1[i].dot(&jb.d1[j]);
                    let gr = jr.d1[i].dot(&jr.d1[j]);
                    assert!((gb - gr).abs() <= 1e-12, "{id} warps the metric");
                }
            }
        }
    }

    #[test]
    fn unknown_entries_and_bad_params_are_config_errors() {
        assert!(matches!(
            default_entry("moebius"),
            Err(GeomError::UnknownEntry(_))
        ));
        let mut over = BTreeMap::new();
        over.insert("radius".to_string(), 99.0);
        assert!(matches!(
            instantiate("sphere-round", &over),
            Err(GeomError::ParamOutOfRange { .. })
        ));
        let mut wrong = BTreeMap::new();
        wrong.insert("radius".to_string(), 1.0);
        assert!(matches!(
            instantiate("plane", &wrong),
            Err(GeomError::Config(_))
        ));
    }

    #[test]
    fn parameter_overrides_are_recorded() {
        let mut over = BTreeMap::new();
        over.insert("radius".to_string(), 0.8);
        let entry = instantiate("sphere-round", &over).unwrap();
        assert!(!entry.default_params);
        assert_eq!(entry.params["radius"], 0.8);
        let x = entry.chart.eval(&[0.0, 0.7]).unwrap();
        assert!((x.norm() - 0.8).abs() <= 1e-12);
    }

    #[test]
    fn perturbed_entries_are_seed_deterministic() {
        let a = default_entry("perturbed-torus-e4").unwrap();
        let b = default_entry("perturbed-torus-e4").unwrap();
        let xa = a.chart.eval(&[0.5, 0.6]).unwrap();
        let xb = b.chart.eval(&[0.5, 0.6]).unwrap();
        assert_eq!(xa, xb);
        let mut over = BTreeMap::new();
        over.insert("seed".to_string(), 8.0);
        let c = instantiate("perturbed-torus-e4", &over).unwrap();
        let xc = c.chart.eval(&[0.5, 0.6]).unwrap();
        assert!((&xa - &xc).norm() > 1e-6, "different seeds must differ");
    }
}
