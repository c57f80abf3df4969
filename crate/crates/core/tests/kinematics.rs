use qcnn::data::synthetic_jets;
use qcnn::jetprep::{
    gram_schmidt_basis, jet_to_image, preprocess, project_constituent, rescale_and_boost, FourMomentum, Jet,
    JetLabel, PrepConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Jets of massless constituents scattered in a cone around a random axis.
fn random_jets(n: usize, seed: u64) -> Vec<Jet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let count = rng.gen_range(3..60);
            let theta0: f64 = rng.gen_range(0.3..2.8);
            let phi0: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let constituents = (0..count)
                .map(|_| {
                    let e: f64 = rng.gen_range(1.0..200.0);
                    let th: f64 = theta0 + rng.gen_range(-0.4..0.4);
                    let ph: f64 = phi0 + rng.gen_range(-0.4..0.4);
                    FourMomentum::new(e, e * th.sin() * ph.cos(), e * th.sin() * ph.sin(), e * th.cos())
                })
                .collect();
            let label = if rng.gen_bool(0.5) { JetLabel::Top } else { JetLabel::Qcd };
            Jet { constituents, label }
        })
        .collect()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[test]
fn boost_hits_target_energy_and_mass() {
    for (mass, energy) in [(1.0, 10.0), (2.5, 4.0), (1.0, 1.0)] {
        for jet in random_jets(1000, 1) {
            let b = rescale_and_boost(&jet, mass, energy).unwrap();
            let t = b.total();
            assert!((t.e - energy).abs() <= 1e-6 * energy);
            assert!((t.mass() - mass).abs() <= 1e-6 * mass);
            // massless constituents stay massless
            for p in &b.constituents {
                assert!(p.mass_sqr().abs() <= 1e-9 * p.e * p.e);
                assert!(p.e > 0.0);
            }
        }
    }
}

#[test]
fn basis_is_orthonormal_and_axis_aligned() {
    for jet in random_jets(1000, 2) {
        let b = rescale_and_boost(&jet, 1.0, 10.0).unwrap();
        let basis = gram_schmidt_basis(&b).unwrap();
        let e = [basis.e1, basis.e2, basis.e3];
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(e[i], e[j]) - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn massless_projections_stay_in_unit_disc() {
    for jet in random_jets(1000, 3) {
        let b = rescale_and_boost(&jet, 1.0, 10.0).unwrap();
        let basis = gram_schmidt_basis(&b).unwrap();
        for p in &b.constituents {
            let (x, y, _) = project_constituent(p, &basis).unwrap();
            assert!(x * x + y * y <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn pixel_sum_is_energy_fraction() {
    let cfg = PrepConfig::default();
    let mut jets = random_jets(900, 4);
    jets.extend(synthetic_jets(100, 4));
    for jet in &jets {
        let r = jet_to_image(jet, &cfg).unwrap();
        assert_eq!(r.dropped, 0);
        let b = rescale_and_boost(jet, cfg.mass, cfg.energy).unwrap();
        let expect: f64 = b.constituents.iter().map(|p| p.e).sum::<f64>() / cfg.energy;
        assert!((r.image.sum() - expect).abs() < 1e-12);
        assert!((r.image.sum() - 1.0).abs() < 1e-9);
        assert_eq!(r.image.pixels.len(), 28 * 28);
    }
}

#[test]
fn preprocess_keeps_order_and_counts_failures() {
    let mut jets = random_jets(20, 5);
    // two back-to-back massless constituents plus a collinear one form no basis
    jets.insert(
        3,
        Jet {
            constituents: vec![
                FourMomentum::new(1.0, 0.0, 0.0, 1.0),
                FourMomentum::new(1.0, 0.0, 0.0, -1.0),
                FourMomentum::new(0.5, 0.0, 0.0, 0.5),
            ],
            label: JetLabel::Top,
        },
    );
    let (images, report) = preprocess(&jets, &PrepConfig::default());
    assert_eq!(report.input, 21);
    assert_eq!(report.kept + report.degenerate + report.kinematics_errors, 21);
    assert_eq!(report.kept, 20);
    let labels: Vec<JetLabel> = jets
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != 3)
        .map(|(_, j)| j.label)
        .collect();
    assert_eq!(images.iter().map(|(_, l)| *l).collect::<Vec<_>>(), labels);
}
