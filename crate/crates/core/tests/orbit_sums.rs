use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vreglab::character_lab::FilteredCharacter;
use vreglab::finite_torus::TwistedTorus;
use vreglab::orbit_sums::{henniart_test, orbit_sum_orthogonality, predicted_table, random_character, FiniteModel, HenniartMode};
use vreglab::signs::BuildingPoint;

fn gl(n: usize, q: u64, depth: usize) -> FiniteModel {
    FiniteModel::with_centralizer(TwistedTorus::from_names(&format!("GL({n})"), "coxeter", q).unwrap(), depth).unwrap()
}

#[test]
fn henniart_gl2_q3_exhaustive() {
    let r = henniart_test(&gl(2, 3, 1), HenniartMode::Exhaustive).unwrap();
    assert_eq!((r.characters, r.admissible), (72, 48));
    assert!(r.counterexamples.is_empty());
    assert!(r.degenerate.is_empty());
    assert!(r.equalities >= 48 * 2);
}

#[test]
fn henniart_gl2_q5_exhaustive() {
    let r = henniart_test(&gl(2, 5, 1), HenniartMode::Exhaustive).unwrap();
    assert_eq!((r.characters, r.admissible), (600, 480));
    assert!(r.counterexamples.is_empty());
    assert_eq!(r.equalities, 480 * 2);
}

#[test]
fn orthogonality_matches_coincidences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in [gl(2, 3, 1), gl(3, 2, 1)] {
        for _ in 0..40 {
            let a = random_character(&m, &mut rng);
            let b = if rand::Rng::gen_bool(&mut rng, 0.5) { m.conjugates(&a)[1].clone() } else { random_character(&m, &mut rng) };
            let r = orbit_sum_orthogonality(&m, &a, &b).unwrap();
            if m.positive_stabilizer(&a) == 1 && m.positive_stabilizer(&b) == 1 {
                assert_eq!(r.normalized, Some(r.coincidences as i64));
            }
        }
    }
}

#[test]
fn gl2_predicted_table_has_six_rows() {
    let m = gl(2, 3, 1);
    let theta = m.characters().unwrap().into_iter().find(|t| t.levels[0] != vec![0, 0] && m.positive_stabilizer(t) == 1).unwrap();
    let t = predicted_table(&m, &theta, &BuildingPoint::hyperspecial(m.torus())).unwrap();
    assert_eq!(t.sign, 1);
    assert_eq!(t.rows.len(), 6);
    let _ = FilteredCharacter::trivial(m.torus(), m.space(), 1);
}

#[test]
fn toral_characters_have_nonvanishing_orbit_sums() {
    for q in [3u64, 5] {
        let m = gl(2, q, 1);
        let domain = m.vreg_elements().unwrap();
        for theta in m.characters().unwrap() {
            if !vreglab::character_lab::is_toral(m.torus(), m.space(), &theta).unwrap() {
                continue;
            }
            assert!(domain.iter().any(|g| !m.orbit_sum(&theta, g).is_zero()), "{theta:?}");
        }
    }
}

#[test]
fn trivial_stabilizer_iff_zero_toral_for_gl2() {
    let m = gl(2, 5, 1);
    for theta in m.characters().unwrap() {
        let zt = vreglab::character_lab::is_zero_toral(m.torus(), m.space(), &theta).unwrap();
        assert_eq!(m.positive_stabilizer(&theta) == 1, zt);
    }
}

#[test]
fn sl2_even_characteristic_characters_are_weyl_fixed() {
    for q in [2u64, 4, 8] {
        let t = TwistedTorus::from_names("SL(2)", "coxeter", q).unwrap();
        assert_eq!(t.order(), q + 1);
        let m = FiniteModel::with_centralizer(t, 1).unwrap();
        assert_eq!(m.group().order(), 2);
        for theta in m.characters().unwrap() {
            assert_eq!(m.positive_stabilizer(&theta), 2);
        }
    }
}

#[test]
fn conjugate_pair_is_an_equality() {
    let m = gl(2, 3, 1);
    let theta = m.characters().unwrap().into_iter().find(|t| m.positive_stabilizer(t) == 1).unwrap();
    let other = m.conjugates(&theta)[1].clone();
    let d = m.vreg_elements().unwrap();
    assert!(d.iter().all(|g| m.orbit_sum(&theta, g).equals(&m.orbit_sum(&other, g))));
    let r = orbit_sum_orthogonality(&m, &theta, &other).unwrap();
    assert_eq!(r.normalized, Some(1));
}

#[test]
fn depth_zero_twist_moves_rows_by_the_twist() {
    let m = gl(2, 3, 1);
    let x = BuildingPoint::hyperspecial(m.torus());
    let theta = m.characters().unwrap().into_iter().find(|t| m.positive_stabilizer(t) == 1).unwrap();
    let tau = vec![3u64];
    let a = predicted_table(&m, &theta, &x).unwrap();
    let b = predicted_table(&m, &theta.twist_depth_zero(m.torus(), &tau), &x).unwrap();
    let n = m.root_order();
    let tau_char = FilteredCharacter { depth: 1, depth_zero: tau, levels: vec![vec![0, 0]] };
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        // same sign: Σ_v ε φ(vγ) τ(vγ) summand by summand
        let el = vreglab::orbit_sums::ModelElement { coords: ra.coords.clone(), levels: vec![vec![0, 0]] };
        let mut expect = vreglab::cyclotomic::CycloSum::zero(n);
        for (v, c) in m.conjugates(&a.phi).iter().enumerate() {
            let moved = m.actions().torus[v].apply(&ra.coords);
            let shift = if a.epsilon.value(&moved) < 0 { n / 2 } else { 0 };
            let t = m.exponent(&tau_char, &m.act(v, &el));
            expect.add_term(m.exponent(c, &el) + shift + t, 1);
        }
        if a.sign < 0 {
            expect = expect.neg();
        }
        assert!(rb.value.equals(&expect));
    }
}

#[test]
fn predicted_rows_are_constant_on_orbits() {
    let m = gl(3, 5, 1);
    let x = BuildingPoint::hyperspecial(m.torus());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let theta = loop {
        let t = random_character(&m, &mut rng);
        if vreglab::character_lab::is_toral(m.torus(), m.space(), &t).unwrap() {
            break t;
        }
    };
    let table = predicted_table(&m, &theta, &x).unwrap();
    let index: std::collections::HashMap<_, _> = table.rows.iter().map(|r| (r.coords.clone(), &r.value)).collect();
    for row in &table.rows {
        for v in 0..m.group().order() {
            let moved = m.actions().torus[v].apply(&row.coords);
            assert!(index[&moved].equals(&row.value));
        }
    }
}
