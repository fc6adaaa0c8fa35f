//! Named Borcherds–Cartan data used by the verification suites.

use crate::datum::BorcherdsCartanDatum;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub datum: BorcherdsCartanDatum,
}

const TABLE: &[(&str, &[&[i64]])] = &[
    ("real", &[&[2]]),
    ("imaginary-zero", &[&[0]]),
    ("imaginary-minus-two", &[&[-2]]),
    ("mixed", &[&[2, -1], &[-1, -2]]),
    ("mixed-long", &[&[2, -2], &[-1, 0]]),
    ("rank-three", &[&[2, -1, 0], &[-1, -2, -1], &[0, -1, 2]]),
    ("b2", &[&[2, -1], &[-2, 2]]),
    ("imaginary-pair", &[&[0, -1], &[-1, -2]]),
    ("a2", &[&[2, -1], &[-1, 2]]),
];

pub fn fixtures() -> Vec<Fixture> {
    TABLE
        .iter()
        .map(|(name, rows)| Fixture {
            name,
            datum: BorcherdsCartanDatum::from_matrix(rows.iter().map(|r| r.to_vec()).collect())
                .expect("fixture data are valid"),
        })
        .collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_cover_the_required_shapes() {
        let fs = fixtures();
        assert!(fs.len() >= 6);
        let has = |p: &dyn Fn(&BorcherdsCartanDatum) -> bool| fs.iter().any(|f| p(&f.datum));
        assert!(has(&|d| d.rank() == 1 && d.is_real(0)));
        assert!(has(&|d| d.rank() == 1 && d.cartan(0, 0) == 0));
        assert!(has(&|d| d.rank() == 1 && d.cartan(0, 0) == -2));
        assert!(has(&|d| d.rank() == 2 && d.is_real(0) && d.is_imaginary(1) && d.cartan(0, 1) == -2));
        assert!(has(&|d| d.rank() == 3 && d.bilinear(0, 2) == 0));
        assert!(fixture("b2").is_some());
    }
}
