use lempert_lab::conformal::{
    build_riemann_map, build_riemann_map_with, disc_automorphism, example4_domain, ConformalMap, MapMethod,
    MapOptions,
};
use lempert_lab::domain::{build_domain, Domain, DomainSpec};
use lempert_lab::{Error, C64};

fn ellipse() -> Domain {
    build_domain(&DomainSpec::from_json(r#"{"kind": "ellipse", "a": 2.0, "b": 1.0}"#).unwrap()).unwrap()
}

fn grid(domain: &Domain, m: usize) -> Vec<C64> {
    let bb = domain.bbox();
    let mut pts = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let z = C64::new(
                bb.min.re + (i as f64 + 0.5) / m as f64 * bb.width(),
                bb.min.im + (j as f64 + 0.5) / m as f64 * bb.height(),
            );
            if domain.signed_distance(z) > 1e-3 {
                pts.push(z);
            }
        }
    }
    pts
}

fn cr_residual(map: &ConformalMap, z: C64) -> f64 {
    let h = 1e-5;
    let f = |z| map.forward(z).unwrap().value;
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let dy = (f(z + C64::new(0.0, h)) - f(z - C64::new(0.0, h))) / (2.0 * h);
    let d = map.forward(z).unwrap().derivative;
    ((dy - C64::new(0.0, 1.0) * dx).norm() + (dx - d).norm()) / d.norm()
}

#[test]
fn unit_disc_map_is_identity() {
    let d = build_domain(&DomainSpec::UnitDisc { samples: 1024 }).unwrap();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    let v = m.forward(C64::new(0.5, 0.0)).unwrap();
    assert!((v.value - C64::new(0.5, 0.0)).norm() < 1e-15);
    let (w, dw) = m.map_forward(C64::new(0.3, 0.1)).unwrap();
    assert!((w - C64::new(0.3, 0.1)).norm() < 1e-15 && (dw - 1.0).norm() < 1e-15);
    assert!((m.inverse(C64::new(0.0, 0.4)).unwrap() - C64::new(0.0, 0.4)).norm() < 1e-15);
}

#[test]
fn scaled_disc_map() {
    let d = build_domain(&DomainSpec::from_json(r#"{"kind": "disc", "radius": 2.0}"#).unwrap()).unwrap();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    let (w, dw) = m.map_forward(C64::new(1.0, 0.0)).unwrap();
    assert!((w - 0.5).norm() < 1e-15 && (dw - 0.5).norm() < 1e-15);
    assert!((m.inverse(C64::new(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn szego_on_disc_reproduces_mobius_map() {
    let d = build_domain(&DomainSpec::UnitDisc { samples: 512 }).unwrap();
    let opts = MapOptions {
        method: MapMethod::Szego,
        nodes: Some(256),
    };
    let a = C64::new(0.3, -0.2);
    let m = build_riemann_map_with(&d, a, &opts).unwrap();
    for &z in &[C64::new(0.0, 0.0), C64::new(0.9, 0.1), C64::new(-0.5, 0.5), C64::new(0.999, 0.0)] {
        let exact = (z - a) / (C64::new(1.0, 0.0) - a.conj() * z);
        let got = m.forward(z).unwrap().value;
        assert!((got - exact).norm() < 1e-10, "{z}: {got} vs {exact}");
    }
}

#[test]
fn ellipse_map_round_trip_and_conformality() {
    let d = ellipse();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    assert_eq!(m.method(), "szego");
    let c = m.forward(C64::new(0.0, 0.0)).unwrap();
    assert!(c.value.norm() < 1e-9);
    assert!(c.derivative.im.abs() < 1e-9 * c.derivative.norm() && c.derivative.re > 0.0);
    let pts = grid(&d, 20);
    assert!(pts.len() > 250);
    let mut worst_rt: f64 = 0.0;
    let mut worst_cr: f64 = 0.0;
    for &z in &pts {
        let w = m.forward(z).unwrap();
        assert!(w.derivative.norm() > 0.0);
        let back = m.inverse(w.value).unwrap();
        worst_rt = worst_rt.max((back - z).norm());
        worst_cr = worst_cr.max(cr_residual(&m, z));
        // real symmetry
        let wc = m.forward(z.conj()).unwrap();
        assert!((wc.value - w.value.conj()).norm() < 1e-9);
    }
    assert!(worst_rt < 1e-8, "round trip {worst_rt:e}");
    assert!(worst_cr < 1e-6, "Cauchy-Riemann residual {worst_cr:e}");
}

#[test]
fn szego_and_theodorsen_agree_on_ellipse() {
    let d = ellipse();
    let s = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    let t = build_riemann_map_with(
        &d,
        C64::new(0.0, 0.0),
        &MapOptions {
            method: MapMethod::Theodorsen,
            nodes: Some(1024),
        },
    )
    .unwrap();
    for &z in &[C64::new(0.3, 0.2), C64::new(1.9, 0.0), C64::new(-1.0, 0.8), C64::new(0.0, -0.99)] {
        let a = s.forward(z).unwrap();
        let b = t.forward(z).unwrap();
        assert!((a.value - b.value).norm() < 1e-9, "{z}: {} vs {}", a.value, b.value);
        assert!((a.defect - b.defect).abs() < 1e-9);
    }
}

#[test]
fn near_boundary_defect_is_accurate() {
    let d = ellipse();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    // along the real axis the map is real; defect must match 1 - |ψ|² and
    // shrink linearly with the distance
    let mut prev = f64::INFINITY;
    for k in 1..=5 {
        let s = 10f64.powi(-k);
        let v = m.forward(C64::new(2.0 - s, 0.0)).unwrap();
        assert!(v.defect > 0.0 && v.defect < prev);
        let ratio = v.defect / (2.0 * s * v.derivative.norm());
        assert!((ratio - 1.0).abs() < 0.2, "k={k}: {ratio}");
        prev = v.defect;
    }
}

#[test]
fn collar_is_refused_for_numerical_maps() {
    let d = ellipse();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    let err = m.forward(C64::new(2.0 - 1e-7, 0.0)).unwrap_err();
    assert!(matches!(err, Error::TooCloseToBoundary { .. }));
    assert!(matches!(m.forward(C64::new(2.5, 0.0)), Err(Error::OutsideDomain { .. })));
    assert!(matches!(
        build_riemann_map(&d, C64::new(2.0 - 1e-7, 0.0)),
        Err(Error::TooCloseToBoundary { .. })
    ));
}

#[test]
fn boundary_correspondence_is_monotone() {
    let d = ellipse();
    let m = build_riemann_map(&d, C64::new(0.0, 0.0)).unwrap();
    let table = m.boundary_correspondence(512);
    for k in 0..table.len() {
        let (a, b) = (table[k].1, table[(k + 1) % table.len()].1);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        assert!((b / a).arg() > 0.0);
    }
    let mut buf = Vec::new();
    m.write_correspondence_csv(8, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t_source,re,im"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn disc_automorphism_examples() {
    let id = disc_automorphism(C64::new(0.0, 0.0)).unwrap();
    assert!((id.forward(C64::new(0.3, 0.2)).unwrap().value - C64::new(0.3, 0.2)).norm() < 1e-15);
    let m = disc_automorphism(C64::new(0.5, 0.0)).unwrap();
    assert!(m.forward(C64::new(0.5, 0.0)).unwrap().value.norm() < 1e-15);
    assert!((m.forward(C64::new(0.0, 0.0)).unwrap().value + 0.5).norm() < 1e-15);
    for &z in &[C64::new(0.1, 0.7), C64::new(-0.6, -0.3)] {
        let back = m.inverse(m.forward(z).unwrap().value).unwrap();
        assert!((back - z).norm() < 1e-14);
    }
    assert!(disc_automorphism(C64::new(1.0, 0.0)).is_err());
}

#[test]
fn example4_map_values() {
    let (d, m) = example4_domain().unwrap();
    assert!(m.is_exact());
    let f = |u: C64| m.inverse(u).unwrap();
    assert!(f(C64::new(0.0, 0.0)).norm() < 1e-15);
    assert!((f(C64::new(-0.999_999_999, 0.0)).re - (-2.0 + 2.0 * 2f64.ln())).abs() < 1e-7);
    // 2 is a real boundary point with inward normal -1
    assert!(d.signed_distance(C64::new(2.0, 0.0)).abs() < 1e-9);
    // the boundary bends inward faster than linearly, so the foot point of
    // a nearby axis point sits off the axis
    let near = d.nearest(C64::new(1.999, 0.0));
    assert!(near.signed_distance > 0.0 && near.signed_distance < 1e-3);
    assert!((near.point - C64::new(2.0, 0.0)).norm() < 1e-2);
    assert!(d.inward_normal(0.0).map(|n| (n + 1.0).norm() < 1e-6).unwrap_or(false));
    // |ψ(w)| increases to 1 along the real axis
    let mut prev = 0.0;
    for k in 1..=6 {
        let w = 2.0 - 10f64.powi(-k);
        let v = m.forward(C64::new(w, 0.0)).unwrap();
        assert!(v.value.norm() > prev && v.value.norm() < 1.0);
        prev = v.value.norm();
    }
}
