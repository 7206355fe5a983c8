use dihull::format::{HullPointJson, Num};
use dihull::Instance;
use dihull_core::Rational;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i128..=1000, 1i128..=60).prop_map(|(p, q)| Rational::new(p, q).unwrap())
}

fn nums(len: usize) -> impl Strategy<Value = Vec<Num>> {
    prop::collection::vec(rational().prop_map(Num), len)
}

proptest! {
    #[test]
    fn rationals_round_trip_as_strings(x in rational()) {
        let text = serde_json::to_string(&Num(x)).unwrap();
        prop_assert!(text.starts_with('"'));
        let back: Num = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.0, x);
    }

    #[test]
    fn matrix_instances_round_trip(n in 1usize..5, seed in any::<u64>()) {
        let q: Vec<Vec<Num>> = (0..n)
            .map(|i| (0..n).map(|j| Num(Rational::from(((seed >> ((i * n + j) % 60)) & 7) as i64))).collect())
            .collect();
        let inst = Instance::Matrix { q };
        let back: Instance = serde_json::from_str(&serde_json::to_string(&inst).unwrap()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn cloud_instances_round_trip(f in nums(2), p in nums(4)) {
        let inst = Instance::PointCloud { dim: 2, functionals: vec![f], points: p.chunks(2).map(|c| c.to_vec()).collect() };
        let back: Instance = serde_json::from_str(&serde_json::to_string_pretty(&inst).unwrap()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn hull_points_round_trip(f1 in nums(3), f2 in nums(3), minimal in any::<bool>()) {
        let h = HullPointJson { f1, f2, minimal };
        let back: HullPointJson = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
        prop_assert_eq!(back, h);
    }
}

#[test]
fn mixed_instance_fields_are_rejected() {
    let text = r#"{"kind":"matrix","q":[["0"]],"dim":1}"#;
    let e = serde_json::from_str::<Instance>(text).unwrap_err();
    assert!(e.to_string().contains("exactly the field `q`"), "{e}");
    assert!(serde_json::from_str::<Instance>(r#"{"kind":"matrix","q":[["0"]],"extra":1}"#).is_err());
}
