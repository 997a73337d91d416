use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use whittaker_bench::bz::BzTower;
use whittaker_bench::chartable::{character_table, CharacterTable};
use whittaker_bench::classfn::ClassFn;
use whittaker_bench::field::{build_tower, AdditiveCharacter, Field, FieldTower};
use whittaker_bench::gelfand_graev::{BesselTable, GelfandGraev};
use whittaker_bench::matgroup::bruhat::NCharacter;
use whittaker_bench::matgroup::{FiniteGroup, Mat, DEFAULT_BUDGET};

fn tower4() -> &'static BzTower {
    static T: OnceLock<BzTower> = OnceLock::new();
    T.get_or_init(|| BzTower::new(Arc::new(build_tower(2, 1).unwrap()), 3, false, DEFAULT_BUDGET, 1).unwrap())
}

fn combo(chars: &[ClassFn], coefs: &[i64]) -> ClassFn {
    let items: Vec<(i64, &ClassFn)> = chars.iter().zip(coefs.iter().cycle()).map(|(c, &a)| (a, c)).collect();
    ClassFn::linear_combination(chars[0].len(), &items)
}

struct Split {
    g: FiniteGroup,
    t: CharacterTable,
    field: Arc<Field>,
}

fn split4() -> &'static Split {
    static S: OnceLock<Split> = OnceLock::new();
    S.get_or_init(|| {
        let field = Arc::new(Field::new(2, 2).unwrap());
        let g = FiniteGroup::general_linear(field.clone(), 2, DEFAULT_BUDGET).unwrap();
        let t = character_table(&g, 1).unwrap();
        Split { g, t, field }
    })
}

fn bessel4() -> &'static (NCharacter, Vec<BesselTable>) {
    static B: OnceLock<(NCharacter, Vec<BesselTable>)> = OnceLock::new();
    B.get_or_init(|| {
        let s = split4();
        let psi = NCharacter::standard(AdditiveCharacter::on_field(&s.field, 1), 2);
        let gg = GelfandGraev::new(&s.g, psi.clone()).unwrap();
        (psi, gg.all_bessel(&s.t).unwrap())
    })
}

fn towers() -> &'static [FieldTower] {
    static T: OnceLock<Vec<FieldTower>> = OnceLock::new();
    T.get_or_init(|| vec![build_tower(3, 1).unwrap(), build_tower(2, 2).unwrap(), build_tower(5, 1).unwrap()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minus_functors_invert_plus_functors(m in 2usize..=3, coefs in prop::collection::vec(0i64..4, 1..8)) {
        let t = tower4();
        let g = combo(&t.gl(m - 1).table.chars, &coefs);
        prop_assert!(t.psi_minus(m, &t.psi_plus(m, &g)).exact_eq(&g));
        prop_assert!(t.phi_minus(m, &t.psi_plus(m, &g)).is_zero());
        let f = combo(&t.p(m - 1).table.chars, &coefs);
        prop_assert!(t.phi_minus(m, &t.phi_plus(m, &f)).exact_eq(&f));
        prop_assert!(t.psi_minus(m, &t.phi_plus(m, &f)).is_zero());
    }

    #[test]
    fn mirabolic_restriction_splits(m in 2usize..=3, coefs in prop::collection::vec(0i64..4, 1..8)) {
        let t = tower4();
        let tau = combo(&t.p(m).table.chars, &coefs);
        let back = t.phi_plus(m, &t.phi_minus(m, &tau)).add(&t.psi_plus(m, &t.psi_minus(m, &tau)));
        prop_assert!(back.exact_eq(&tau));
    }

    #[test]
    fn shrink_keeps_values(vals in prop::collection::vec(prop::collection::vec((0u32..3, -5i64..6), 0..4), 1..6), den in 1i64..7, m in prop::sample::select(vec![6u32, 12, 15, 24])) {
        let f = ClassFn::new(3, den, vals).lift(m);
        let s = f.shrink();
        prop_assert_eq!(3 % s.order(), 0);
        prop_assert!(s.exact_eq(&f));
    }

    #[test]
    fn bessel_is_bi_equivariant(x in 0u32..16, y in 0u32..16, gi in 0u32..180) {
        let s = split4();
        let (psi, tables) = bessel4();
        let f = &s.field;
        let n1 = Mat::from_rows(&[&[1, x % 4], &[0, 1]]);
        let n2 = Mat::from_rows(&[&[1, y % 4], &[0, 1]]);
        let g = s.g.elem(gi);
        let h = n1.mul(g, f).mul(&n2, f);
        let gg = GelfandGraev::new(&s.g, psi.clone()).unwrap();
        let phase = (psi.phase(&n1, f) + psi.phase(&n2, f)) as i64;
        for b in tables {
            prop_assert_eq!(gg.eval(b, &h), gg.eval(b, g).mul_root(psi.p(), phase));
        }
    }

    #[test]
    fn trace_and_norm_land_in_base(i in 0usize..3, a in 0u32..625, b in 0u32..625) {
        let t = &towers()[i];
        let e = t.ext();
        let (a, b) = (a % e.size(), b % e.size());
        prop_assert!(t.in_base(e.add(a, t.frobenius(a))));
        prop_assert!(t.in_base(e.mul(a, t.frobenius(a))));
        prop_assert_eq!(t.frobenius(t.frobenius(a)), a);
        prop_assert_eq!(t.frobenius(e.mul(a, b)), e.mul(t.frobenius(a), t.frobenius(b)));
        prop_assert_eq!(t.frobenius(e.add(a, b)), e.add(t.frobenius(a), t.frobenius(b)));
    }
}
