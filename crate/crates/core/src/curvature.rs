//! Horizontal second fundamental form.
//!
//! With `G_k = Z_k f` the unnormalized horizontal normal of a defining
//! function, `ν = G/|G|` extends `ν^H` off `S`, and because the
//! pseudohermitian connection is flat in the `Z` frame,
//! `∇_X ν = Σ X(ν_k) Z_k`. Everything below is read off the matrix
//! `D[h][k] = Z_h(ν_k)(p)`.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::group::{frame_apply, HVec, Point};
use crate::linalg::{bilinear, dot, frobenius_sq, trace};
use crate::poly::Poly;
use crate::surface::{tangent_basis_from_normal, Surface, CHAR_TOL};

/// Two routes to `h` must agree to this absolute tolerance (scaled by
/// `1 + max|h_ij|`).
pub const ROUTE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeForm {
    pub basis: Vec<HVec<f64>>,
    /// `h_matrix[i][j] = h(e_i, e_j)`
    pub h_matrix: Vec<Vec<f64>>,
    pub td_h: f64,
}

impl ShapeForm {
    pub fn norm_sq(&self) -> f64 {
        frobenius_sq(&self.h_matrix)
    }

    pub fn trace(&self) -> f64 {
        trace(&self.h_matrix)
    }

    pub fn symmetrize(&self) -> ShapeForm {
        symmetrize(self)
    }
}

/// Normal data at a non-characteristic point, shared by every routine here.
#[derive(Debug, Clone)]
struct NormalJet {
    nu: Vec<f64>,
    d: Vec<Vec<f64>>,
    td_h: f64,
}

fn normal_jet(s: &Surface, p: &Point<f64>, char_tol: f64, shift: Option<&[f64]>) -> Result<NormalJet> {
    s.check_on_surface(p)?;
    let hj = s.horizontal_jet(p)?;
    let g_len = hj.g.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nh = g_len / hj.grad_norm;
    if nh <= char_tol {
        return Err(Error::Characteristic(nh));
    }
    let m = hj.g.len();
    let mut zg = hj.zg;
    if let Some(v) = shift {
        check_len(m, v.len())?;
        // ν' = (G + f V)/|G + f V|, and Z_h(f V_k) = G_h V_k on S
        for h in 0..m {
            for k in 0..m {
                zg[h][k] += hj.g[h] * v[k];
            }
        }
    }
    let g = &hj.g;
    let inv = 1.0 / g_len;
    let inv3 = inv * inv * inv;
    let d = (0..m)
        .map(|h| {
            let radial = dot(g, &zg[h]);
            (0..m).map(|k| zg[h][k] * inv - g[k] * radial * inv3).collect()
        })
        .collect();
    Ok(NormalJet {
        nu: g.iter().map(|v| v * inv).collect(),
        d,
        td_h: hj.dt / g_len,
    })
}

/// `D[h][k] = Z_h(ν^H_k)(p)` for the canonical extension `G/|G|`.
pub fn nu_derivative_matrix(s: &Surface, p: &Point<f64>) -> Result<Vec<Vec<f64>>> {
    Ok(normal_jet(s, p, CHAR_TOL, None)?.d)
}

/// As [`nu_derivative_matrix`], for the unit extension `(G + f V)/|G + f V|`
/// with a constant horizontal field `V`. Agrees with the canonical one only
/// in the tangential directions.
pub fn nu_derivative_matrix_shifted(s: &Surface, p: &Point<f64>, v: &HVec<f64>) -> Result<Vec<Vec<f64>>> {
    Ok(normal_jet(s, p, CHAR_TOL, Some(v.components()))?.d)
}

/// `Σ_{h,k} D[h][k] D[k][h]`
pub fn contraction(d: &[Vec<f64>]) -> f64 {
    let m = d.len();
    (0..m).map(|h| (0..m).map(|k| d[h][k] * d[k][h]).sum::<f64>()).sum()
}

/// `h(e_i, e_j) = e_iᵀ D e_j`
pub fn h_in_basis(d: &[Vec<f64>], basis: &[HVec<f64>]) -> Vec<Vec<f64>> {
    basis
        .iter()
        .map(|ei| basis.iter().map(|ej| bilinear(ei.components(), d, ej.components())).collect())
        .collect()
}

fn shape_form(s: &Surface, p: &Point<f64>, char_tol: f64) -> Result<(NormalJet, ShapeForm)> {
    let nj = normal_jet(s, p, char_tol, None)?;
    let nu = HVec::from_components(&nj.nu)?;
    let basis = tangent_basis_from_normal(&nu);
    let h_matrix = h_in_basis(&nj.d, &basis);
    let td_h = nj.td_h;
    Ok((nj, ShapeForm { basis, h_matrix, td_h }))
}

pub fn second_fundamental_form(s: &Surface, p: &Point<f64>) -> Result<ShapeForm> {
    Ok(shape_form(s, p, CHAR_TOL)?.1)
}

/// `h` through `−⟨∇_{e_i} Ŷ_j, ν⟩ / |G(p)|²` with the polynomial tangent field
/// `Ŷ_j = |G|² e_j − ⟨e_j, G⟩ G`, which is orthogonal to `G` everywhere and
/// equals `|G(p)|² e_j` at `p`. Needs a polynomial defining function.
pub fn h_by_tangent_extension(s: &Surface, p: &Point<f64>, basis: &[HVec<f64>]) -> Result<Vec<Vec<f64>>> {
    let f = s
        .defining_poly()
        .ok_or_else(|| Error::Unsupported("tangent-extension route needs a polynomial surface".into()))?;
    let n = s.n();
    let m = 2 * n;
    let c = p.coords();
    let g: Vec<Poly<f64>> = (0..m).map(|k| frame_apply(n, k, f)).collect::<Result<_>>()?;
    let g_sq = g.iter().fold(Poly::zero(f.nvars()), |acc, gk| &acc + &(gk * gk));
    let g_at: Vec<f64> = g.iter().map(|gk| gk.eval(&c)).collect::<Result<_>>()?;
    let g_sq_at = g_at.iter().map(|v| v * v).sum::<f64>();
    let nu: Vec<f64> = g_at.iter().map(|v| v / g_sq_at.sqrt()).collect();
    let mut out = vec![vec![0.0; basis.len()]; basis.len()];
    for (j, ej) in basis.iter().enumerate() {
        let e = ej.components();
        let proj = e
            .iter()
            .zip(&g)
            .fold(Poly::zero(f.nvars()), |acc, (a, gk)| &acc + &gk.scale(*a));
        let field: Vec<Poly<f64>> = (0..m)
            .map(|k| &g_sq.scale(e[k]) - &(&proj * &g[k]))
            .collect();
        // ⟨∇_{Z_h} Ŷ, ν⟩ at p for every frame direction h
        let along: Vec<f64> = (0..m)
            .map(|h| {
                field.iter().zip(&nu).try_fold(0.0, |acc, (yk, nk)| {
                    Ok::<_, Error>(acc + frame_apply(n, h, yk)?.eval(&c)? * nk)
                })
            })
            .collect::<Result<_>>()?;
        for (i, ei) in basis.iter().enumerate() {
            out[i][j] = -dot(ei.components(), &along) / g_sq_at;
        }
    }
    Ok(out)
}

/// [`second_fundamental_form`] cross-checked against
/// [`h_by_tangent_extension`]; fails with [`Error::RouteMismatch`] when the
/// routes differ by more than [`ROUTE_TOL`].
pub fn second_fundamental_form_verified(s: &Surface, p: &Point<f64>) -> Result<ShapeForm> {
    let sf = second_fundamental_form(s, p)?;
    let other = h_by_tangent_extension(s, p, &sf.basis)?;
    let scale = 1.0 + sf.h_matrix.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let gap = sf
        .h_matrix
        .iter()
        .flatten()
        .zip(other.iter().flatten())
        .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    if gap > ROUTE_TOL * scale {
        return Err(Error::RouteMismatch(gap));
    }
    Ok(sf)
}

/// `h̃(X, Y) = (h(X, Y) + h(Y, X)) / 2`
pub fn symmetrize(sf: &ShapeForm) -> ShapeForm {
    let h = &sf.h_matrix;
    let k = h.len();
    let h_matrix = (0..k)
        .map(|i| (0..k).map(|j| 0.5 * (h[i][j] + h[j][i])).collect())
        .collect();
    ShapeForm {
        basis: sf.basis.clone(),
        h_matrix,
        td_h: sf.td_h,
    }
}

/// `|h|² = Σ Z_h(ν_k) Z_k(ν_h) + 4(n−1)(Td^H)²`
pub fn norm_h_sq_formula(s: &Surface, p: &Point<f64>) -> Result<f64> {
    let nj = normal_jet(s, p, CHAR_TOL, None)?;
    Ok(contraction(&nj.d) + 4.0 * (s.n() as f64 - 1.0) * nj.td_h * nj.td_h)
}

/// `|h̃|² = Σ Z_h(ν_k) Z_k(ν_h) + 2(n−1)(Td^H)²`
pub fn norm_tilde_h_sq_formula(s: &Surface, p: &Point<f64>) -> Result<f64> {
    let nj = normal_jet(s, p, CHAR_TOL, None)?;
    Ok(contraction(&nj.d) + 2.0 * (s.n() as f64 - 1.0) * nj.td_h * nj.td_h)
}

/// `H = div_H ν^H = Σ Z_i(ν_i)`
pub fn mean_curvature(s: &Surface, p: &Point<f64>) -> Result<f64> {
    Ok(trace(&nu_derivative_matrix(s, p)?))
}

/// Horizontally totally geodesic at `p`: `|h̃|² < tol²`.
pub fn is_htg_at(s: &Surface, p: &Point<f64>, tol: f64) -> Result<bool> {
    Ok(norm_tilde_h_sq_formula(s, p)? < tol * tol)
}

/// One row of a curvature grid. Curvature fields are absent at
/// characteristic points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub p: Vec<f64>,
    pub characteristic: bool,
    pub td_h: Option<f64>,
    pub mean_curvature: Option<f64>,
    pub norm_h_sq: Option<f64>,
    pub norm_tilde_h_sq: Option<f64>,
    pub htg: Option<bool>,
}

impl CurvatureSample {
    pub const CSV_HEADER: &'static str = "char,td_h,mean_curvature,norm_h_sq,norm_tilde_h_sq,htg";
}

/// Everything on a grid row; `char_tol` decides the characteristic flag and
/// `htg_tol` the totally-geodesic flag.
pub fn curvature_sample(s: &Surface, p: &Point<f64>, char_tol: f64, htg_tol: f64) -> Result<CurvatureSample> {
    match normal_jet(s, p, char_tol, None) {
        Ok(nj) => {
            let c = contraction(&nj.d);
            let k = s.n() as f64 - 1.0;
            let tilde = c + 2.0 * k * nj.td_h * nj.td_h;
            Ok(CurvatureSample {
                p: p.coords(),
                characteristic: false,
                td_h: Some(nj.td_h),
                mean_curvature: Some(trace(&nj.d)),
                norm_h_sq: Some(c + 4.0 * k * nj.td_h * nj.td_h),
                norm_tilde_h_sq: Some(tilde),
                htg: Some(tilde < htg_tol * htg_tol),
            })
        }
        Err(Error::Characteristic(_)) => Ok(CurvatureSample {
            p: p.coords(),
            characteristic: true,
            td_h: None,
            mean_curvature: None,
            norm_h_sq: None,
            norm_tilde_h_sq: None,
            htg: None,
        }),
        Err(e) => Err(e),
    }
}

/// `|h|²` and `|h̃|²` by both routes: `(formula_h, frobenius_h, formula_tilde,
/// frobenius_tilde)`.
pub fn norms_both_routes(s: &Surface, p: &Point<f64>) -> Result<(f64, f64, f64, f64)> {
    let (nj, sf) = shape_form(s, p, CHAR_TOL)?;
    let c = contraction(&nj.d);
    let k = s.n() as f64 - 1.0;
    Ok((
        c + 4.0 * k * nj.td_h * nj.td_h,
        sf.norm_sq(),
        c + 2.0 * k * nj.td_h * nj.td_h,
        symmetrize(&sf).norm_sq(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::BoxDomain;
    use crate::linalg::pivoted_gram_schmidt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(c: &[f64]) -> Point<f64> {
        Point::from_coords(c).unwrap()
    }

    fn hyperplane_point(a: &[f64], b: &[f64], d: f64, x: &[f64], y: &[f64]) -> Point<f64> {
        let t = -(dot(a, x) + dot(b, y) + d);
        Point::new(x, y, t).unwrap()
    }

    fn random_t_graph(n: usize, rng: &mut ChaCha8Rng) -> Surface {
        let mut terms = Vec::new();
        for _ in 0..6 {
            let mut e = vec![0u32; 2 * n];
            let deg = rng.gen_range(1..=3);
            for _ in 0..deg {
                e[rng.gen_range(0..2 * n)] += 1;
            }
            terms.push((rng.gen_range(-1.0..1.0), e));
        }
        Surface::t_graph(n, Poly::from_terms(2 * n, terms).unwrap()).unwrap()
    }

    #[test]
    fn vertical_hyperplane_is_flat() {
        let s = Surface::vertical_hyperplane(&[1.0, 2.0], &[-0.5, 0.3], 0.7).unwrap();
        let p = pt(&[0.7, 0.0, 0.0, 0.0, 1.3]);
        let d = nu_derivative_matrix(&s, &p).unwrap();
        assert!(d.iter().flatten().all(|v| *v == 0.0));
        assert_eq!(second_fundamental_form(&s, &p).unwrap().norm_sq(), 0.0);
        assert_eq!(norm_h_sq_formula(&s, &p).unwrap(), 0.0);
        assert_eq!(mean_curvature(&s, &p).unwrap(), 0.0);
        assert!(is_htg_at(&s, &p, 1e-8).unwrap());
    }

    #[test]
    fn flat_plane_at_unit_point() {
        let s = Surface::h0(2).unwrap();
        let p = pt(&[1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!((norm_h_sq_formula(&s, &p).unwrap() - 2.0).abs() < 1e-14);
        let sf = second_fundamental_form_verified(&s, &p).unwrap();
        assert!((sf.norm_sq() - 2.0).abs() < 1e-14);
        assert!(norm_tilde_h_sq_formula(&s, &p).unwrap().abs() < 1e-14);
        assert!((sf.td_h - 1.0).abs() < 1e-15);
        assert!(matches!(
            second_fundamental_form(&s, &Point::origin(2)),
            Err(Error::Characteristic(_))
        ));
    }

    #[test]
    fn hyperplane_closed_forms() {
        let (a, b, d) = ([1.0, -2.0], [0.5, 0.0], 3.0);
        let s = Surface::hyperplane(&a, &b, 1.0, d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..40 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let p = hyperplane_point(&a, &b, d, &x, &y);
            let denom = (a[0] + y[0]).powi(2) + (a[1] + y[1]).powi(2) + (b[0] - x[0]).powi(2) + (b[1] - x[1]).powi(2);
            let nj = normal_jet(&s, &p, CHAR_TOL, None).unwrap();
            assert!((contraction(&nj.d) + 2.0 * nj.td_h * nj.td_h).abs() < 1e-12 * (1.0 + 1.0 / denom));
            let h = norm_h_sq_formula(&s, &p).unwrap();
            assert!((h - 2.0 / denom).abs() < 1e-10 * h);
            assert!(mean_curvature(&s, &p).unwrap().abs() < 1e-12);
            assert!(is_htg_at(&s, &p, 1e-5).unwrap());
        }
    }

    #[test]
    fn derivative_matrix_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = random_t_graph(2, &mut rng);
        let z = [0.3, -0.2, 0.5, 0.1];
        let p = s.chart_point(&z).unwrap();
        let d = nu_derivative_matrix(&s, &p).unwrap();
        // extension G/|G| evaluated directly off S
        let nu_off = |c: &[f64]| -> Vec<f64> {
            let q = pt(c);
            let jet = s.defining_jet(&q).unwrap();
            let n = 2;
            let g: Vec<f64> = (0..2 * n)
                .map(|k| jet.gradient[k] + crate::group::frame_t_coeff(n, k, c) * jet.gradient[2 * n])
                .collect();
            let l = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            g.iter().map(|v| v / l).collect()
        };
        let h = 1e-5;
        for dir in 0..4 {
            let zv = crate::group::frame_vector(dir, &p).unwrap();
            let c = p.coords();
            let up: Vec<f64> = c.iter().zip(&zv).map(|(a, b)| a + h * b).collect();
            let down: Vec<f64> = c.iter().zip(&zv).map(|(a, b)| a - h * b).collect();
            let (nu_u, nu_d) = (nu_off(&up), nu_off(&down));
            for k in 0..4 {
                let fd = (nu_u[k] - nu_d[k]) / (2.0 * h);
                assert!((fd - d[dir][k]).abs() < 1e-5, "D[{dir}][{k}]: {fd} vs {}", d[dir][k]);
            }
        }
    }

    #[test]
    fn tangent_extension_route_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            for _ in 0..5 {
                let s = random_t_graph(n, &mut rng);
                let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let p = s.chart_point(&z).unwrap();
                match second_fundamental_form_verified(&s, &p) {
                    Ok(_) | Err(Error::Characteristic(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn norms_are_basis_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_t_graph(3, &mut rng);
        let p = s.chart_point(&[0.2, 0.4, -0.3, 0.6, -0.1, 0.25]).unwrap();
        let sf = second_fundamental_form(&s, &p).unwrap();
        let d = nu_derivative_matrix(&s, &p).unwrap();
        let k = sf.basis.len();
        // random orthogonal mixing of the basis
        let raw: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let o = pivoted_gram_schmidt(&raw, k, 1e-9);
        let mixed: Vec<HVec<f64>> = o
            .iter()
            .map(|row| {
                let mut c = vec![0.0; 6];
                for (w, e) in row.iter().zip(&sf.basis) {
                    crate::linalg::axpy(&mut c, *w, e.components());
                }
                HVec::from_components(&c).unwrap()
            })
            .collect();
        let other = h_in_basis(&d, &mixed);
        assert!((frobenius_sq(&other) - sf.norm_sq()).abs() < 1e-10);
        let other_sf = ShapeForm { basis: mixed, h_matrix: other, td_h: sf.td_h };
        assert!((symmetrize(&other_sf).norm_sq() - symmetrize(&sf).norm_sq()).abs() < 1e-10);
        assert!((other_sf.trace() - sf.trace()).abs() < 1e-10);
    }

    #[test]
    fn symmetrize_properties() {
        let sf = ShapeForm {
            basis: vec![],
            h_matrix: vec![vec![0.0, 2.0], vec![-2.0, 0.0]],
            td_h: 0.0,
        };
        assert_eq!(symmetrize(&sf).h_matrix, vec![vec![0.0; 2]; 2]);
        let sym = ShapeForm {
            h_matrix: vec![vec![1.0, 3.0], vec![3.0, -2.0]],
            ..sf.clone()
        };
        assert_eq!(symmetrize(&sym), sym);
        let mixed = ShapeForm {
            h_matrix: vec![vec![1.0, 3.0], vec![-1.0, 5.0]],
            ..sf
        };
        assert_eq!(symmetrize(&symmetrize(&mixed)), symmetrize(&mixed));
    }

    #[test]
    fn one_dimensional_forms_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let s = random_t_graph(1, &mut rng);
            let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = s.chart_point(&z).unwrap();
            let Ok(sf) = second_fundamental_form(&s, &p) else { continue };
            assert_eq!(sf.h_matrix.len(), 1);
            assert_eq!(symmetrize(&sf), sf);
            assert_eq!(norm_h_sq_formula(&s, &p).unwrap(), norm_tilde_h_sq_formula(&s, &p).unwrap());
        }
    }

    #[test]
    fn extension_independence() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=3 {
            let s = random_t_graph(n, &mut rng);
            let z: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = s.chart_point(&z).unwrap();
            let v: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v = HVec::from_components(&v).unwrap();
            let c0 = contraction(&nu_derivative_matrix(&s, &p).unwrap());
            let d1 = nu_derivative_matrix_shifted(&s, &p, &v).unwrap();
            let c1 = contraction(&d1);
            assert!((c0 - c1).abs() < 1e-7 * (1.0 + c0.abs()));
            // the extensions really differ
            assert!(d1 != nu_derivative_matrix(&s, &p).unwrap());
        }
    }

    #[test]
    fn saddle_is_minimal_but_not_totally_geodesic() {
        let s = Surface::saddle(2).unwrap();
        let p = s.chart_point(&[0.6, 0.5, -0.4, 0.2]).unwrap();
        assert!(mean_curvature(&s, &p).unwrap().abs() < 1e-12);
        assert!(norm_tilde_h_sq_formula(&s, &p).unwrap() > 1e-4);
        assert!(!is_htg_at(&s, &p, 1e-2).unwrap());
    }

    #[test]
    fn characteristic_rows_have_no_curvature() {
        let s = Surface::h0(2).unwrap();
        let row = curvature_sample(&s, &Point::origin(2), CHAR_TOL, 1e-8).unwrap();
        assert!(row.characteristic && row.norm_h_sq.is_none());
        let row = curvature_sample(&s, &pt(&[1.0, 0.0, 0.0, 0.0, 0.0]), CHAR_TOL, 1e-8).unwrap();
        assert_eq!(row.htg, Some(true));
    }

    #[test]
    fn intrinsic_graph_routes_agree() {
        let phi = Poly::from_terms(4, vec![(0.1, vec![0, 2, 0, 0]), (0.05, vec![0, 0, 0, 1]), (0.3, vec![1, 0, 1, 0])]).unwrap();
        let s = Surface::intrinsic_y1(2, phi, BoxDomain::cube(4, 2.0)).unwrap();
        let p = s.chart_point(&[0.3, -0.2, 0.4, 0.1]).unwrap();
        let sf = second_fundamental_form_verified(&s, &p).unwrap();
        let (fh, bh, ft, bt) = norms_both_routes(&s, &p).unwrap();
        assert!((fh - bh).abs() < 1e-10 && (ft - bt).abs() < 1e-10);
        assert!((sf.trace() - mean_curvature(&s, &p).unwrap()).abs() < 1e-12);
    }
}
