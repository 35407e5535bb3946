use proptest::prelude::*;
use vpl_pde::geometry::{GeometrySpec, Primitive};
use vpl_pde::mesh::rasterize;
use vpl_pde::solver::{disk_seed, solve_lambda};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accepted_solutions_satisfy_invariants(
        radius in 0.4f64..1.2,
        mu in 0.02f64..0.45,
        cx in -0.3f64..0.3,
        inv_h in 16u32..40,
    ) {
        let h = 1.0 / inv_h as f64;
        let mesh = rasterize(&GeometrySpec::disk([cx, 0.1], radius), h).unwrap();
        let lambda = 8.0 * mu * (1.0 - mu) / (radius * radius);
        let mut seed = vec![0.0; mesh.len()];
        disk_seed(&mesh, [cx, 0.1], radius, mu, &mut seed);
        let s = solve_lambda(&mesh, lambda, Some(&seed)).unwrap();
        prop_assert!(s.residual <= 1e-10);
        prop_assert!(s.u.iter().all(|&u| u > 0.0));
        prop_assert!(s.energy_mismatch() <= 10.0 * h * h, "{} > {}", s.energy_mismatch(), 10.0 * h * h);
        prop_assert!((s.beta + s.lambda * s.z).abs() <= 1e-12 * s.beta.abs());
    }

    #[test]
    fn mask_area_tracks_geometry(
        r1 in 0.3f64..0.6,
        r2 in 0.3f64..0.6,
        width in 0.15f64..0.3,
    ) {
        let d = r1 + r2 + 0.4;
        let g = GeometrySpec::new(
            vec![
                Primitive::Disk { center: [0.0, 0.0], radius: r1 },
                Primitive::Disk { center: [d, 0.0], radius: r2 },
                Primitive::Channel { from: [0.0, 0.0], to: [d, 0.0], width },
            ],
            true,
        )
        .unwrap();
        let h = 1.0 / 64.0;
        let m = rasterize(&g, h).unwrap();
        prop_assert_eq!(m.components(), 1);
        let a = m.quadrature_area();
        // Lower bound: two disks and the bare channel between them.
        let lower = std::f64::consts::PI * (r1 * r1 + r2 * r2) + width * 0.4;
        prop_assert!(a > lower * 0.99 && a < lower * 1.05, "{a} vs {lower}");
    }
}
