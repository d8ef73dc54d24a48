use cancelable_vss::bmp::{encode_bmp, load_bmp};
use cancelable_vss::rng::SplitMix64;
use cancelable_vss::scheme::{self, MethodKind, SchemeParams, ShareSet};
use cancelable_vss::{BitTransform, Error, GrayImage};
use proptest::prelude::*;

fn random_image(w: u32, h: u32, seed: u64) -> GrayImage {
    let mut rng = SplitMix64::new(seed);
    GrayImage::from_fn(w, h, |_, _| rng.next_u64() as u8).unwrap()
}

fn method() -> impl Strategy<Value = MethodKind> {
    prop_oneof![
        Just(MethodKind::M1),
        Just(MethodKind::M2),
        Just(MethodKind::M3)
    ]
}

fn transform() -> impl Strategy<Value = BitTransform> {
    prop_oneof![
        Just(BitTransform::Reverse8),
        (1u8..=7).prop_map(BitTransform::Rotate)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn authenticate_inverts_enroll(
        method in method(),
        n in 2usize..=6,
        t in transform(),
        w in 2u32..20,
        h in 1u32..20,
        seed in any::<u64>(),
    ) {
        let original = random_image(w, h, seed);
        let mut rng = SplitMix64::new(seed ^ 0x5555);
        let seeds = (0..method.seed_count(n)).map(|_| rng.next_u64()).collect();
        let params = SchemeParams::new(method, n, t, seeds).unwrap();
        let (secret, covers) = scheme::make_covers(&original, &params, &[]).unwrap();
        let set = scheme::generate_template(&original, &params, &[]).unwrap();
        prop_assert_eq!(set.dims(), Some((w, h)));
        let back = scheme::authenticate(&set).unwrap();
        prop_assert_eq!(&back.secret, &secret);
        prop_assert_eq!(&back.covers, &covers);
        prop_assert_eq!(scheme::reveal_original(&back, &params).unwrap(), original);
    }

    #[test]
    fn any_proper_subset_is_refused(n in 2usize..=6, keep in 0usize..6, seed in any::<u64>()) {
        let keep = keep % n;
        let original = random_image(8, 8, seed);
        let seeds = (0..n as u64).map(|i| seed.wrapping_add(i)).collect();
        let params = SchemeParams::new(MethodKind::M3, n, BitTransform::Reverse8, seeds).unwrap();
        let mut set = scheme::generate_template(&original, &params, &[]).unwrap();
        set.shares.truncate(keep);
        let refused = matches!(scheme::authenticate(&set), Err(Error::MissingShare { .. }));
        prop_assert!(refused);
    }
}

#[test]
fn bmp_iris_through_the_scheme() {
    let img = random_image(320, 240, 9);
    let palette: Vec<[u8; 3]> = (0..=255u8).map(|v| [v, v, v]).collect();
    let loaded = load_bmp(&encode_bmp(320, 240, 8, img.pixels(), &palette)).unwrap();
    assert_eq!(loaded, img);
    let params =
        SchemeParams::new(MethodKind::M3, 4, BitTransform::Reverse8, vec![1, 2, 3, 4]).unwrap();
    let set: ShareSet = scheme::generate_template(&loaded, &params, &[]).unwrap();
    let back = scheme::authenticate(&set).unwrap();
    assert_eq!(scheme::reveal_original(&back, &params).unwrap(), img);
}
