//! The ten candidate coset-space families and concrete realizations of the
//! admissible ones.

use serde::{Deserialize, Serialize};

use super::{Block, CosetSpace};
use crate::error::{Error, Result};
use crate::liealg::{
    build_algebra, diagonal_element, root_plane_decomposition, unit, AlgebraSpec, BasisKind,
    LieAlgebra, ReductiveSplit, Subalgebra,
};
use crate::numkernel::linalg::{nullspace, orthonormalize, DenseMatrix};

/// One row of the catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogCase {
    pub id: u8,
    pub g: String,
    pub k: String,
    pub h: String,
    pub space: String,
    /// Whether the family carries a constructor (positively curved candidates).
    pub admissible: bool,
    pub parameters: String,
    /// Why the family is dropped, or which members are dropped.
    pub exclusion: Option<String>,
}

fn row(id: u8, g: &str, k: &str, h: &str, space: &str, admissible: bool, parameters: &str, exclusion: Option<&str>) -> CatalogCase {
    CatalogCase {
        id,
        g: g.into(),
        k: k.into(),
        h: h.into(),
        space: space.into(),
        admissible,
        parameters: parameters.into(),
        exclusion: exclusion.map(str::to_string),
    }
}

/// All ten families in order.
pub fn catalog() -> Vec<CatalogCase> {
    vec![
        row(1, "su(n+1)", "su(n)+R", "su(n)", "S^{2n+1} = SU(n+1)/SU(n)", true, "n >= 1", None),
        row(
            2,
            "su(n+1)+R",
            "su(n)+R+R",
            "su(n)+R",
            "S^{2n+1} = U(n+1)/U(n)",
            true,
            "n >= 1",
            Some("members covered by SU(n+1)/S(U(n)U(1)) x R are dropped: that product has no positively curved invariant metric"),
        ),
        row(3, "sp(n+1)", "sp(n)+R", "sp(n)", "S^{4n+3} = Sp(n+1)/Sp(n)", true, "n >= 1", None),
        row(
            4,
            "sp(n+1)+R",
            "sp(n)+R+R",
            "sp(n)+R",
            "S^{4n+3} = Sp(n+1)U(1)/(Sp(n)U(1))",
            true,
            "n >= 1",
            Some("members covered by Sp(n+1)/(Sp(n)U(1)) x R are dropped for the same reason as case 2"),
        ),
        row(
            5,
            "sp(n+1)+R",
            "sp(n)+sp(1)+R",
            "sp(n)+sp(1)",
            "HP^n-bundle over R",
            false,
            "n >= 1",
            Some("universal cover splits off a line: quaternionic projective space times R, never positively curved"),
        ),
        row(
            6,
            "su(3)",
            "R+R (Cartan)",
            "R",
            "S_{k,l} = SU(3)/T^1",
            true,
            "k l (k+l) != 0, gcd(k,l) = 1, k >= l",
            Some("k l (k+l) = 0 gives SU(3)/U(1) with U(1) in a standard SU(2): a zero-curvature flag always exists"),
        ),
        row(
            7,
            "su(3)+R",
            "R+R+R",
            "R+R",
            "U(3)/T^2",
            true,
            "T^2 in the diagonal torus, not inside SU(3)",
            Some("T^2 inside SU(3) gives a cover (SU(3)/T^2) x R, never positively curved; T^2 meeting SU(3) in an SU(2) circle has a zero-curvature flag"),
        ),
        row(
            8,
            "sp(3)+R",
            "3 sp(1)+R",
            "3 sp(1)",
            "Sp(3)/Sp(1)^3 x R (cover)",
            false,
            "",
            Some("covered by a product with a line factor, so no positively curved invariant metric exists"),
        ),
        row(
            9,
            "f4+R",
            "so(9)+R",
            "so(9)",
            "F4/Spin(9) x R (cover)",
            false,
            "",
            Some("covered by F4/Spin(9) times a line; such a product does not admit positively curved invariant metrics"),
        ),
        row(
            10,
            "f4+R",
            "so(8)+R",
            "so(8)",
            "F4/Spin(8) x R (cover)",
            false,
            "",
            Some("covered by F4/Spin(8) times a line; such a product does not admit positively curved invariant metrics"),
        ),
    ]
}

/// Parameters selecting one concrete space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseParams {
    pub case: u8,
    pub n: usize,
    pub k: i64,
    pub l: i64,
    /// Two generators of `T^2` as `sqrt(-1) diag(.)` entries (case 7).
    pub torus: Option<[[f64; 3]; 2]>,
    /// Allow the zero-flag members of cases 6 and 7.
    pub negative_control: bool,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams {
            case: 1,
            n: 1,
            k: 1,
            l: 1,
            torus: None,
            negative_control: false,
        }
    }
}

/// `(k, l)` divided by the gcd, then the largest of `(k, l)`, `(l, k)` and
/// their negatives, which all give the same circle up to conjugation.
pub fn normalize_kl(k: i64, l: i64) -> Result<(i64, i64)> {
    if k == 0 && l == 0 {
        return Err(Error::Config("(k, l) = (0, 0) does not define a circle".into()));
    }
    let g = gcd(k.unsigned_abs(), l.unsigned_abs()) as i64;
    let (k, l) = (k / g, l / g);
    Ok([(k, l), (l, k), (-k, -l), (-l, -k)].into_iter().max().unwrap())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// How `T^2` sits relative to `SU(3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusClass {
    InsideSu3,
    /// Meets `su(3)` in a line conjugate to `diag(1,-1,0)`.
    Su2Circle,
    Generic,
}

pub fn classify_torus(t: &[[f64; 3]; 2]) -> Result<TorusClass> {
    let tr = |d: &[f64; 3]| d.iter().sum::<f64>();
    let (a, b) = (t[0], t[1]);
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    if cross.iter().all(|x| x.abs() < 1e-12) {
        return Err(Error::Config("torus generators are linearly dependent".into()));
    }
    let (ta, tb) = (tr(&a), tr(&b));
    if ta.abs() < 1e-12 && tb.abs() < 1e-12 {
        return Ok(TorusClass::InsideSu3);
    }
    // trace-free combination
    let line: Vec<f64> = (0..3).map(|i| tb * a[i] - ta * b[i]).collect();
    let scale = line.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let has_zero = line.iter().any(|x| x.abs() < 1e-12 * scale);
    Ok(if has_zero { TorusClass::Su2Circle } else { TorusClass::Generic })
}

/// Builds the space for the given parameters, refusing excluded members
/// unless they are requested as negative controls.
pub fn build_case(p: &CaseParams) -> Result<CosetSpace> {
    let mut sp = match p.case {
        1 => sphere_su(p.n)?,
        2 => sphere_u(p.n)?,
        3 => sphere_sp(p.n)?,
        4 => sphere_sp_u1(p.n)?,
        6 => {
            let (k, l) = normalize_kl(p.k, p.l)?;
            if k * l * (k + l) == 0 && !p.negative_control {
                return Err(Error::Structural(format!(
                    "case 6 with (k, l) = ({k}, {l}) is excluded: k l (k+l) = 0"
                )));
            }
            aloff_wallach(k, l)?
        }
        7 => {
            let (k, l) = normalize_kl(p.k, p.l)?;
            let t = p
                .torus
                .unwrap_or([[k as f64, l as f64, -(k + l) as f64], [1.0, 0.0, 0.0]]);
            match classify_torus(&t)? {
                TorusClass::InsideSu3 => {
                    return Err(Error::Structural(
                        "case 7 with T^2 inside SU(3) is excluded: (SU(3)/T^2) x R is never positively curved".into(),
                    ))
                }
                TorusClass::Su2Circle if !p.negative_control => {
                    return Err(Error::Structural(
                        "case 7 with T^2 meeting SU(3) in an SU(2) circle is excluded (zero-curvature flag)".into(),
                    ))
                }
                _ => {}
            }
            u3_torus(t)?
        }
        5 | 8 | 9 | 10 => {
            let c = &catalog()[p.case as usize - 1];
            return Err(Error::Structural(format!(
                "case {} is excluded: {}",
                p.case,
                c.exclusion.clone().unwrap_or_default()
            )));
        }
        other => return Err(Error::Config(format!("no catalog case {other}"))),
    };
    sp.case_id = Some(p.case);
    Ok(sp)
}

fn basis_index(g: &LieAlgebra, pred: impl Fn(usize, BasisKind) -> bool) -> Vec<usize> {
    (0..g.dim()).filter(|&i| pred(i, g.kinds()[i])).collect()
}

/// Space whose `m` basis is a list of algebra vectors complementary to `h`.
fn assemble(g: LieAlgebra, h_span: Vec<Vec<f64>>, m: Vec<Vec<f64>>, label: String, blocks: Vec<(String, Vec<usize>)>) -> Result<CosetSpace> {
    let h = if h_span.is_empty() {
        Subalgebra::zero()
    } else {
        Subalgebra::new(&g, &h_span)?
    };
    let split = ReductiveSplit::with_basis(&g, &h, m)?;
    let n = split.dim_m();
    let mut sp = CosetSpace::new(g, h, split, label);
    sp.blocks = blocks
        .into_iter()
        .map(|(name, idx)| Block {
            name,
            vectors: idx.into_iter().map(|i| unit(n, i)).collect(),
        })
        .collect();
    sp.default_v = Some(unit(n, 0));
    Ok(sp)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("catalog spheres need n >= 1".into()));
    }
    Ok(())
}

/// `SU(n+1)/SU(n)`, `m = R H_n + C^n`.
pub fn sphere_su(n: usize) -> Result<CosetSpace> {
    check_n(n)?;
    let g = build_algebra(&AlgebraSpec::Su(n + 1))?;
    let d = g.dim();
    let cart = basis_index(&g, |_, k| k == BasisKind::Cartan);
    let top = *cart.last().unwrap();
    let roots_n = basis_index(&g, |_, k| matches!(k, BasisKind::Root(_, b) if b == n));
    let h: Vec<Vec<f64>> = (0..d)
        .filter(|i| *i != top && !roots_n.contains(i))
        .map(|i| unit(d, i))
        .collect();
    let mut m = vec![unit(d, top)];
    m.extend(roots_n.iter().map(|&i| unit(d, i)));
    let c1 = (1..m.len()).collect();
    assemble(
        g,
        h,
        m,
        format!("S^{} = SU({})/SU({})", 2 * n + 1, n + 1, n),
        vec![("fiber".into(), vec![0]), ("horizontal".into(), c1)],
    )
}

/// `U(n+1)/U(n)`, `m = R iE_nn + C^n`.
pub fn sphere_u(n: usize) -> Result<CosetSpace> {
    check_n(n)?;
    let g = build_algebra(&AlgebraSpec::U(n + 1))?;
    let d = g.dim();
    let cart = basis_index(&g, |_, k| k == BasisKind::Cartan);
    let top = cart[n];
    let roots_n = basis_index(&g, |_, k| matches!(k, BasisKind::Root(_, b) if b == n));
    let h: Vec<Vec<f64>> = (0..d)
        .filter(|i| *i != top && !roots_n.contains(i))
        .map(|i| unit(d, i))
        .collect();
    let mut m = vec![unit(d, top)];
    m.extend(roots_n.iter().map(|&i| unit(d, i)));
    let c1 = (1..m.len()).collect();
    assemble(
        g,
        h,
        m,
        format!("S^{} = U({})/U({})", 2 * n + 1, n + 1, n),
        vec![("fiber".into(), vec![0]), ("horizontal".into(), c1)],
    )
}

/// Indices of the `sp(1)` at quaternion slot `n` and of the off-diagonal part touching it.
fn sp_slots(g: &LieAlgebra, n: usize) -> (Vec<usize>, Vec<usize>) {
    let diag: Vec<usize> = (3 * n..3 * n + 3).collect();
    let off = basis_index(g, |_, k| matches!(k, BasisKind::Root(_, b) if b == n));
    (diag, off)
}

/// `Sp(n+1)/Sp(n)`, `m = Im H + H^n`.
pub fn sphere_sp(n: usize) -> Result<CosetSpace> {
    check_n(n)?;
    let g = build_algebra(&AlgebraSpec::Sp(n + 1))?;
    let d = g.dim();
    let (diag, off) = sp_slots(&g, n);
    let h: Vec<Vec<f64>> = (0..d)
        .filter(|i| !diag.contains(i) && !off.contains(i))
        .map(|i| unit(d, i))
        .collect();
    let mut m: Vec<Vec<f64>> = diag.iter().map(|&i| unit(d, i)).collect();
    m.extend(off.iter().map(|&i| unit(d, i)));
    let c2 = (3..m.len()).collect();
    assemble(
        g,
        h,
        m,
        format!("S^{} = Sp({})/Sp({})", 4 * n + 3, n + 1, n),
        vec![
            ("fiber".into(), vec![0]),
            ("fiber-complement".into(), vec![1, 2]),
            ("horizontal".into(), c2),
        ],
    )
}

/// `Sp(n+1)U(1)/(Sp(n)U(1))` with the diagonal circle `(Z + E)/sqrt 2`.
pub fn sphere_sp_u1(n: usize) -> Result<CosetSpace> {
    check_n(n)?;
    let g = build_algebra(&AlgebraSpec::Sum(vec![AlgebraSpec::Sp(n + 1), AlgebraSpec::Abelian(1)]))?;
    let d = g.dim();
    let (diag, off) = sp_slots(&g, n);
    let e = d - 1;
    let z = diag[0];
    let s = 1.0 / 2f64.sqrt();
    let mut zpe = vec![0.0; d];
    zpe[z] = s;
    zpe[e] = s;
    let mut zme = vec![0.0; d];
    zme[z] = s;
    zme[e] = -s;
    let mut h: Vec<Vec<f64>> = (0..d)
        .filter(|i| !diag.contains(i) && !off.contains(i) && *i != e)
        .map(|i| unit(d, i))
        .collect();
    h.push(zpe);
    let mut m = vec![zme, unit(d, diag[1]), unit(d, diag[2])];
    m.extend(off.iter().map(|&i| unit(d, i)));
    let c2 = (3..m.len()).collect();
    assemble(
        g,
        h,
        m,
        format!("S^{} = Sp({})U(1)/(Sp({})U(1))", 4 * n + 3, n + 1, n),
        vec![
            ("fiber".into(), vec![0]),
            ("fiber-complement".into(), vec![1, 2]),
            ("horizontal".into(), c2),
        ],
    )
}

/// `m` basis for a torus inside the diagonal: toral complement first, then the
/// root planes `(0,1)`, `(0,2)`, `(1,2)`.
fn torus_quotient(g: LieAlgebra, t: Vec<Vec<f64>>, label: String) -> Result<CosetSpace> {
    let d = g.dim();
    let cart = basis_index(&g, |_, k| k == BasisKind::Cartan);
    let h = Subalgebra::new(&g, &t)?;
    // Cartan vectors orthogonal to h
    let rows: Vec<Vec<f64>> = h.basis().iter().map(|q| cart.iter().map(|&i| q[i]).collect()).collect();
    let ns = nullspace(&DenseMatrix::from_rows(&rows), 1e-10);
    let local: Vec<Vec<f64>> = (0..ns.cols()).map(|c| ns.col(c)).collect();
    let local = orthonormalize(&local, &DenseMatrix::identity(cart.len()), 1e-10);
    let mut m: Vec<Vec<f64>> = local
        .iter()
        .map(|c| {
            let mut x = vec![0.0; d];
            for (ci, &i) in c.iter().zip(&cart) {
                x[i] = *ci;
            }
            x
        })
        .collect();
    let m0 = m.len();
    let mut blocks = vec![("m0".to_string(), (0..m0).collect::<Vec<_>>())];
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let idx = basis_index(&g, |_, k| k == BasisKind::Root(a, b));
        let start = m.len();
        m.extend(idx.iter().map(|&i| unit(d, i)));
        blocks.push((format!("plane({},{})", a + 1, b + 1), (start..m.len()).collect()));
    }
    let h_span = h.basis().to_vec();
    let mut sp = assemble(g, h_span, m, label, blocks)?;
    let roots = root_plane_decomposition(&sp.g, &sp.h, &sp.split)?;
    sp.roots = Some(roots);
    Ok(sp)
}

/// `SU(3)/T^1` with `T^1` generated by `sqrt(-1) diag(k, l, -k-l)`.
pub fn aloff_wallach(k: i64, l: i64) -> Result<CosetSpace> {
    let g = build_algebra(&AlgebraSpec::Su(3))?;
    let t = diagonal_element(&g, &[k as f64, l as f64, -(k + l) as f64])?;
    let label = if k * l * (k + l) == 0 {
        format!("SU(3)/U(1), circle ({k},{l},{}) in an SU(2)", -(k + l))
    } else {
        format!("S_{{{k},{l}}} = SU(3)/T^1")
    };
    torus_quotient(g, vec![t], label)
}

/// `U(3)/T^2` for two diagonal generators.
pub fn u3_torus(t: [[f64; 3]; 2]) -> Result<CosetSpace> {
    let g = build_algebra(&AlgebraSpec::U(3))?;
    let gens = t
        .iter()
        .map(|d| diagonal_element(&g, d))
        .collect::<Result<Vec<_>>>()?;
    let label = format!("U(3)/T^2, T^2 = span(diag{:?}, diag{:?})", t[0], t[1]);
    torus_quotient(g, gens, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_rows_six_admissible() {
        let c = catalog();
        assert_eq!(c.len(), 10);
        let adm: Vec<u8> = c.iter().filter(|r| r.admissible).map(|r| r.id).collect();
        assert_eq!(adm, vec![1, 2, 3, 4, 6, 7]);
        assert!(c[8].exclusion.as_ref().unwrap().contains("F4/Spin(9)"));
    }

    #[test]
    fn dimensions() {
        for (case, n, dim) in [(1, 1, 3), (1, 2, 5), (2, 1, 3), (2, 2, 5), (3, 1, 7), (4, 1, 7), (6, 1, 7), (7, 1, 7)] {
            let sp = build_case(&CaseParams { case, n, ..Default::default() }).unwrap();
            assert_eq!(sp.n(), dim, "case {case} n {n}");
        }
    }

    #[test]
    fn default_v_is_fixed() {
        for case in [1, 2, 3, 4, 6, 7] {
            let sp = build_case(&CaseParams { case, n: 2, ..Default::default() }).unwrap();
            let v = sp.default_v.clone().unwrap();
            assert!(super::super::h_defect(&sp, &v) < 1e-12, "case {case}");
        }
    }

    #[test]
    fn exclusions() {
        let bad = CaseParams { case: 6, k: 1, l: -1, ..Default::default() };
        assert!(build_case(&bad).is_err());
        assert!(build_case(&CaseParams { negative_control: true, ..bad }).is_ok());
        let inside = CaseParams {
            case: 7,
            torus: Some([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]),
            ..Default::default()
        };
        assert!(build_case(&inside).is_err());
        for id in [5, 8, 9, 10] {
            assert!(build_case(&CaseParams { case: id, ..Default::default() }).is_err());
        }
    }

    #[test]
    fn kl_normalization() {
        assert_eq!(normalize_kl(2, 4).unwrap(), (2, 1));
        assert_eq!(normalize_kl(-3, 3).unwrap(), (1, -1));
    }

    #[test]
    fn torus_classes() {
        assert_eq!(classify_torus(&[[1.0, 1.0, -2.0], [1.0, 0.0, 0.0]]).unwrap(), TorusClass::Generic);
        assert_eq!(classify_torus(&[[1.0, -1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap(), TorusClass::Su2Circle);
        assert_eq!(classify_torus(&[[1.0, -1.0, 0.0], [1.0, 1.0, -2.0]]).unwrap(), TorusClass::InsideSu3);
    }
}
