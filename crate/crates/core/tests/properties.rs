use affine_surface::builders::*;
use affine_surface::flip_graph::triangulation_key;
use affine_surface::flips::{flip, flippable_edges};
use affine_surface::shell::{parse_surface, serialize_surface};
use affine_surface::{Complex64, Corner, HalfEdge, Surface, Triangle};
use proptest::prelude::*;
use std::f64::consts::PI;

fn star_sphere() -> impl Strategy<Value = Surface> {
    (
        prop::array::uniform3(0.1..PI - 0.1),
        prop::array::uniform3(0.3f64..4.0),
        -0.5f64..1.5,
        0.2f64..1.5,
    )
        .prop_filter_map("fourth cone angle must exceed π", |(a, l, re, im)| {
            build_star_sphere(a, l, Complex64::new(re, im)).ok()
        })
}

fn dilation_torus() -> impl Strategy<Value = Surface> {
    (0.1..PI - 0.1, 1.1f64..5.0).prop_map(|(t, l)| build_dilation_torus(t, l).unwrap())
}

fn lattice_torus() -> impl Strategy<Value = Surface> {
    (0.5f64..2.0, -0.5f64..0.5, -0.8f64..0.8, 0.4f64..2.0)
        .prop_map(|(a, b, c, d)| build_lattice_torus(Complex64::new(a, b), Complex64::new(c, d)).unwrap())
}

fn any_surface() -> impl Strategy<Value = Surface> {
    prop_oneof![star_sphere(), dilation_torus(), lattice_torus()]
}

/// Rebuilds `s` with triangles permuted, their vertices cyclically rotated and each chart moved
/// by its own similarity.
fn relabel(s: &Surface, perm: &[usize], rot: &[usize], maps: &[(Complex64, Complex64)]) -> Surface {
    let n = s.num_triangles();
    let mut tris = vec![Triangle::new(0.0.into(), 1.0.into(), Complex64::i()); n];
    for t in 0..n {
        let p = s.triangle(t).points;
        let (a, b) = maps[t];
        let r = rot[t];
        tris[perm[t]] = Triangle::new(a * p[r] + b, a * p[(r + 1) % 3] + b, a * p[(r + 2) % 3] + b);
    }
    let map = |h: HalfEdge| HalfEdge::new(perm[h.tri], (h.edge + 3 - rot[h.tri]) % 3);
    let glue: Vec<_> = s.gluings().into_iter().map(|(h, k)| (map(h), map(k))).collect();
    let aux: Vec<_> = s
        .auxiliary_corners()
        .into_iter()
        .map(|c| Corner::new(perm[c.tri], (c.corner + 3 - rot[c.tri]) % 3))
        .collect();
    Surface::build(tris, &glue, &aux).unwrap()
}

fn cone_data(s: &Surface) -> Vec<(f64, f64)> {
    let mut v: Vec<_> = s.cones().iter().map(|c| (c.angle, c.dilation)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flip_back_restores_key(s in any_surface(), pick in any::<prop::sample::Index>()) {
        let edges = flippable_edges(&s);
        prop_assume!(!edges.is_empty());
        let e = edges[pick.index(edges.len())];
        let (f, mv) = flip(&s, e).unwrap();
        let (back, _) = flip(&f, mv.inserted).unwrap();
        prop_assert_eq!(triangulation_key(&back), triangulation_key(&s));
        for (x, y) in cone_data(&s).iter().zip(cone_data(&f)) {
            prop_assert!((x.0 - y.0).abs() < 1e-9 && (x.1 - y.1).abs() < 1e-9);
        }
        prop_assert_eq!(f.num_triangles(), s.num_triangles());
    }

    #[test]
    fn key_ignores_labels_and_charts(
        s in any_surface(),
        seed in prop::collection::vec((0usize..3, 0.2f64..3.0, -PI..PI, -2.0f64..2.0, -2.0f64..2.0), 4),
        shuffle in any::<prop::sample::Index>(),
    ) {
        let n = s.num_triangles();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left(shuffle.index(n));
        let rot: Vec<usize> = (0..n).map(|t| seed[t % seed.len()].0).collect();
        let maps: Vec<_> = (0..n)
            .map(|t| {
                let (_, r, phi, x, y) = seed[t % seed.len()];
                (Complex64::from_polar(r, phi), Complex64::new(x, y))
            })
            .collect();
        let moved = relabel(&s, &perm, &rot, &maps);
        prop_assert_eq!(triangulation_key(&moved), triangulation_key(&s));
    }

    #[test]
    fn text_round_trip_is_exact(s in any_surface()) {
        let text = serialize_surface("p", &s);
        let back = parse_surface(&text).unwrap();
        prop_assert_eq!(back.triangles(), s.triangles());
        prop_assert_eq!(back.gluings(), s.gluings());
        prop_assert_eq!(serialize_surface("p", &back), text);
    }

    #[test]
    fn gauss_bonnet_residuals_vanish(s in any_surface()) {
        let gb = s.check_gauss_bonnet().unwrap();
        prop_assert!(gb.r_angle < 1e-9 && gb.r_log < 1e-9, "{:?}", gb);
    }

    #[test]
    fn flips_preserve_gauss_bonnet(s in star_sphere(), picks in prop::collection::vec(any::<prop::sample::Index>(), 1..20)) {
        let mut cur = s;
        for p in picks {
            let edges = flippable_edges(&cur);
            if edges.is_empty() {
                break;
            }
            cur = flip(&cur, edges[p.index(edges.len())]).unwrap().0;
            let gb = cur.check_gauss_bonnet().unwrap();
            prop_assert!(gb.r_angle < 1e-9 && gb.r_log < 1e-9);
        }
    }
}
