use flucmo::format::{format_complex, parse_complex, parse_complex_list, round_sig, JsonComplex};
use flucmo_core::C64;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-3f64..1e-3, Just(0.0)]
}

proptest! {
    #[test]
    fn format_parse_round_trip(re in finite(), im in finite()) {
        let z = C64::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert_eq!(back, C64::new(round_sig(re), round_sig(im)));
    }

    #[test]
    fn rounding_keeps_twelve_digits(x in finite()) {
        let r = round_sig(x);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
        prop_assert_eq!(round_sig(r), r);
    }

    #[test]
    fn json_complex_serializes_rounded(re in finite(), im in finite()) {
        let j = JsonComplex::from(C64::new(re, im));
        let v: serde_json::Value = serde_json::to_value(j).unwrap();
        prop_assert_eq!(v["re"].as_f64(), Some(round_sig(re)));
        prop_assert_eq!(v["im"].as_f64(), Some(round_sig(im)));
    }
}

#[test]
fn lists_and_errors() {
    let v = parse_complex_list("0+2i, -1-1i,3").unwrap();
    assert_eq!(v, vec![C64::new(0.0, 2.0), C64::new(-1.0, -1.0), C64::new(3.0, 0.0)]);
    assert!(parse_complex_list("").unwrap().is_empty());
    assert!(parse_complex("2+").is_err());
}
