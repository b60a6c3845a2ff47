//! Shared fixtures for the benchmarks.

use asw_core::algebra::{parse_ratfunc, Field};
use asw_core::witt::WittVector;

pub fn z25_example() -> WittVector {
    let f5 = Field::prime(5).unwrap();
    WittVector::new(
        5,
        vec![
            parse_ratfunc("1/x + 1/(x-1)", &f5).unwrap(),
            parse_ratfunc("1/(x-1)^7 + 1/(x-2)^12", &f5).unwrap(),
        ],
    )
    .unwrap()
}

pub fn order4_family() -> WittVector {
    let f2t = Field::parametric(2, 1, None, asw_core::Param::T).unwrap();
    WittVector::new(
        2,
        vec![
            parse_ratfunc("1/(x^2(x-t^4))", &f2t).unwrap(),
            parse_ratfunc("1/(x^3(x-t^4)^2(x-t^2)^2)", &f2t).unwrap(),
        ],
    )
    .unwrap()
}
