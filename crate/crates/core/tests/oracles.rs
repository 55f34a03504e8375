//! Closed-form and brute-force oracles, computed without the library's
//! eigensolver wherever possible.

use rand::Rng;
use skewcoh_core::linalg::{ComplexMatrix, C64, ZERO};
use skewcoh_core::measures::{lower_bound, skew_information, skew_information_p, variance};
use skewcoh_core::random::{random_observable, random_unitary, seeded_rng};
use skewcoh_core::state::{DensityMatrix, Observable};

fn qubit(r: [f64; 3]) -> DensityMatrix {
    let m = ComplexMatrix::from_vec(
        2,
        2,
        vec![
            C64::new((1.0 + r[2]) / 2.0, 0.0),
            C64::new(r[0] / 2.0, -r[1] / 2.0),
            C64::new(r[0] / 2.0, r[1] / 2.0),
            C64::new((1.0 - r[2]) / 2.0, 0.0),
        ],
    )
    .unwrap();
    DensityMatrix::new(m).unwrap()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit(rng: &mut impl Rng) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n = dot(v, v).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

// rho = (1 + r.sigma)/2, K = n.sigma:
//   V = 1 - (r.n)^2
//   I = (1 - sqrt(1 - |r|^2)) (1 - (r^.n)^2)
//   I^L = (|r|^2 - (r.n)^2) / 2
#[test]
fn qubit_closed_forms() {
    let mut rng = seeded_rng(11, 0);
    for _ in 0..500 {
        let len: f64 = rng.random_range(0.0..1.0);
        let dir = unit(&mut rng);
        let r = [dir[0] * len, dir[1] * len, dir[2] * len];
        let n = unit(&mut rng);
        let rho = qubit(r);
        let k = Observable::pauli(n);
        let rn = dot(r, n);
        let cos2 = if len > 0.0 { (rn / len).powi(2) } else { 0.0 };
        let v = 1.0 - rn * rn;
        let i = (1.0 - (1.0 - len * len).sqrt()) * (1.0 - cos2);
        let il = (len * len - rn * rn) / 2.0;
        assert!((variance(&rho, &k).unwrap() - v).abs() < 1e-12);
        assert!((skew_information(&rho, &k).unwrap() - i).abs() < 1e-10);
        assert!((lower_bound(&rho, &k).unwrap() - il).abs() < 1e-12);
    }
}

#[test]
fn figure_one_family() {
    for step in 0..=20 {
        let p = step as f64 * 0.05;
        let rho = qubit([p, 0.0, 0.0]);
        let k = Observable::sigma_z();
        assert!((variance(&rho, &k).unwrap() - 1.0).abs() < 1e-12);
        assert!((skew_information(&rho, &k).unwrap() - (1.0 - (1.0 - p * p).sqrt())).abs() < 1e-10);
        assert!((lower_bound(&rho, &k).unwrap() - p * p / 2.0).abs() < 1e-12);
    }
    let half = qubit([0.5, 0.0, 0.0]);
    let i = skew_information(&half, &Observable::sigma_z()).unwrap();
    assert!((i - 0.1339746).abs() < 1e-7);
}

fn conj(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let d = u.rows();
    let mut um = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            let mut acc = ZERO;
            for a in 0..d {
                for b in 0..d {
                    acc += u[(r, a)] * m[(a, b)] * u[(c, b)].conj();
                }
            }
            um[(r, c)] = acc;
        }
    }
    um
}

// With rho diagonal in the computational basis the skew information is a
// plain sum over matrix elements of K; rotating both by the same unitary
// must leave every measure unchanged.
#[test]
fn diagonal_states_under_joint_rotation() {
    let mut rng = seeded_rng(5, 0);
    for d in 2..=6 {
        for trial in 0..40 {
            let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            if trial % 4 == 0 {
                p[0] = 0.0;
            }
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            let k = random_observable(d, rng.random(), None).unwrap();
            let km = k.matrix();
            let mut i_ref = 0.0;
            let mut il_ref = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let w = km[(a, b)].norm_sqr();
                    i_ref += 0.5 * (p[a].sqrt() - p[b].sqrt()).powi(2) * w;
                    il_ref += 0.25 * (p[a] - p[b]).powi(2) * w;
                }
            }
            let mean: f64 = (0..d).map(|a| p[a] * km[(a, a)].re).sum();
            let second: f64 = (0..d)
                .map(|a| p[a] * (0..d).map(|b| km[(a, b)].norm_sqr()).sum::<f64>())
                .sum();
            let v_ref = second - mean * mean;

            let u = random_unitary(d, rng.random());
            let rho = DensityMatrix::new(conj(&u, &ComplexMatrix::from_real_diagonal(&p))).unwrap();
            let k_rot = Observable::new(conj(&u, km)).unwrap();
            assert!(
                (skew_information(&rho, &k_rot).unwrap() - i_ref).abs() < 1e-10,
                "d={d}"
            );
            assert!((lower_bound(&rho, &k_rot).unwrap() - il_ref).abs() < 1e-10);
            assert!((variance(&rho, &k_rot).unwrap() - v_ref).abs() < 1e-10);
        }
    }
}

// For diagonal rho: 1/2 sum_ab (p_a + p_b - p_a^t p_b^(1-t) - p_b^t p_a^(1-t)) |K_ab|^2
#[test]
fn wyd_family_on_diagonal_states() {
    let mut rng = seeded_rng(9, 0);
    for d in 2..=4 {
        for _ in 0..30 {
            let mut p: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = p.iter().sum();
            p.iter_mut().for_each(|x| *x /= s);
            let k = random_observable(d, rng.random(), None).unwrap();
            let t: f64 = rng.random_range(0.05..0.95);
            let mut expect = 0.0;
            for a in 0..d {
                for b in 0..d {
                    let w = k.matrix()[(a, b)].norm_sqr();
                    expect += 0.5
                        * (p[a] + p[b]
                            - p[a].powf(t) * p[b].powf(1.0 - t)
                            - p[b].powf(t) * p[a].powf(1.0 - t))
                        * w;
                }
            }
            let rho = DensityMatrix::diagonal(&p).unwrap();
            assert!((skew_information_p(&rho, &k, t).unwrap() - expect).abs() < 1e-10);
        }
    }
}

#[test]
fn bell_state_local_variance() {
    let s = 1.0 / 2f64.sqrt();
    let bell = DensityMatrix::pure(&[C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap();
    let mut rng = seeded_rng(3, 0);
    for _ in 0..20 {
        let n = unit(&mut rng);
        let k = Observable::pauli(n).embed(&[2, 2], 0).unwrap();
        assert!((skew_information(&bell, &k).unwrap() - 1.0).abs() < 1e-10);
        assert!((variance(&bell, &k).unwrap() - 1.0).abs() < 1e-12);
    }
}
