use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regcalc::bounds::{alpha_upper_bound, mu, s_lower_bound, BoundInput, Outcome};
use regcalc::exactnum::{rat, Rational};

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A consistent input: `0 < 1/p_z < 1/p < 1`, `s̄ > 0`, `z <= s̄`.
fn random_input(rng: &mut impl Rng) -> BoundInput {
    let d: u32 = rng.gen_range(1..7);
    let inv_p = rat(rng.gen_range(1..40), 40);
    let inv_pz = &inv_p * rat(rng.gen_range(0..30), 30);
    let s_bar = rat(rng.gen_range(1..80), rng.gen_range(1..20));
    let z = &s_bar - rat(rng.gen_range(0..60), rng.gen_range(1..20));
    BoundInput::new(d, inv_p, s_bar, inv_pz, z)
}

#[test]
fn finite_bounds_dominate_s_bar() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut finite = 0;
    for _ in 0..10_000 {
        let input = random_input(&mut rng);
        let res = alpha_upper_bound(&input).unwrap();
        if let Outcome::Finite(v) = &res.outcome {
            finite += 1;
            assert!(v >= input.s_bar.finite().unwrap());
        }
    }
    assert!(finite > 1000);
}

#[test]
fn bound_decreases_in_z_and_blows_up_at_mu() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..200 {
        let input = random_input(&mut rng);
        let s_bar = input.s_bar.finite().unwrap().clone();
        let m = mu(&input.inv_p, &input.inv_pz, &s_bar, input.d);
        if m >= s_bar {
            continue;
        }
        let mut prev: Option<Rational> = None;
        for k in (1..=16).rev() {
            // z runs from s̄ down toward mu.
            let z = &m + (&s_bar - &m) * rat(k, 16);
            let mut i = input.clone();
            i.z = z.into();
            let v = alpha_upper_bound(&i).unwrap().value().unwrap().clone();
            if let Some(p) = &prev {
                assert!(&v > p);
            }
            prev = Some(v);
        }
        let mut close_to_mu = input.clone();
        close_to_mu.z = (&m + (&s_bar - &m) / r(1_000_000)).into();
        let v = alpha_upper_bound(&close_to_mu).unwrap().value().unwrap().clone();
        assert!(v >= &s_bar * r(999_999));
    }
}

#[test]
fn poisson_pz_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for d in 2..=6u32 {
        for inv_p in [rat(1, 2), rat(1, 3), rat(2, 3)] {
            let expected = (r(1) + &inv_p) * r(d.into()) / r((d - 1).into());
            for _ in 0..20 {
                let inv_pz = &inv_p * rat(rng.gen_range(1..1000), 1000);
                let input = BoundInput::new(d, inv_p.clone(), r(1) + &inv_p, inv_pz.clone(), r(1) + &inv_pz);
                assert_eq!(alpha_upper_bound(&input).unwrap().value(), Some(&expected));
            }
        }
    }
}

#[test]
fn lower_bound_inverts_upper_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut checked = 0;
    while checked < 1000 {
        let input = random_input(&mut rng);
        let res = alpha_upper_bound(&input).unwrap();
        let Some(alpha) = res.value() else { continue };
        let z = input.z.finite().unwrap();
        let back = s_lower_bound(alpha, &input.inv_p, &input.inv_pz, z, input.d).unwrap();
        assert_eq!(&back, input.s_bar.finite().unwrap());
        checked += 1;
    }
}

#[test]
fn p_poisson_case_one_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for _ in 0..200 {
        let d: u32 = rng.gen_range(2..6);
        // 1 < p < 2.
        let p = rat(rng.gen_range(101..200), 100);
        let inv_p = r(1) / &p;
        let top = r(1) + &inv_p;
        // s̄ in [3/2, 1 + 1/p).
        let s_bar = rat(3, 2) + (&top - rat(3, 2)) * rat(rng.gen_range(0..100), 100);
        let pz = &p / (r(1) - (r(2) - &p) / (r(2) * r(d.into())));
        let input = BoundInput::new(d, inv_p.clone(), s_bar.clone(), r(1) / pz, rat(3, 2));
        let expected = &s_bar * (&top - rat(3, 2)) / (&top - &s_bar);
        assert_eq!(alpha_upper_bound(&input).unwrap().value(), Some(&expected));
    }
}
