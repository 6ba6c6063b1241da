#![no_main]

use higgs_ks::ring::{parse_elem, parse_poly, Ring, RingRef};
use libfuzzer_sys::fuzz_target;

fn ring(selector: u8) -> RingRef {
    match selector % 5 {
        0 => Ring::polynomial(&["x"]),
        1 => Ring::laurent(&["u"], &["u"]).unwrap(),
        2 => Ring::polynomial(&["c"]).with_dual("eps").unwrap(),
        3 => Ring::laurent(&["x", "y"], &["y"])
            .unwrap()
            .with_two_parameters("e1", "e2")
            .unwrap(),
        _ => Ring::polynomial(&["x"]).first_order_diagonal().unwrap(),
    }
}

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let Ok(src) = std::str::from_utf8(rest) else {
        return;
    };
    let ring = ring(selector);
    let _ = parse_poly(&ring, src);
    if let Ok(a) = parse_elem(&ring, src) {
        // printed elements parse back to themselves
        let again = parse_elem(&ring, &a.to_string()).expect("printed literal parses");
        assert_eq!(again, a);
    }
});
