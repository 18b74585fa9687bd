//! Two-legged tie records, CSV ingestion and the strength-ratio predictor.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::Sample;

/// Header every tie file must carry, in this order.
pub const TIE_HEADER: [&str; 9] = [
    "season",
    "competition",
    "round",
    "flht",
    "slht",
    "c1",
    "c2",
    "slht_qualified",
    "extra_time",
];

/// Coefficient given to clubs whose UEFA coefficient is zero, so that the
/// log-ratio stays finite. Well below the smallest real coefficient (0.050).
pub const ZERO_COEFFICIENT_SUBSTITUTE: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Competition {
    ChampionsLeague,
    EuropaLeague,
}

impl Competition {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ChampionsLeague => "ChampionsLeague",
            Self::EuropaLeague => "EuropaLeague",
        }
    }
}

impl std::str::FromStr for Competition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ChampionsLeague" | "CL" => Ok(Self::ChampionsLeague),
            "EuropaLeague" | "EL" => Ok(Self::EuropaLeague),
            other => Err(format!("unknown competition `{other}`")),
        }
    }
}

/// One two-legged knockout tie. `flht` hosts the first leg, `slht` the
/// second; `c1`/`c2` are their UEFA club coefficients at the time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieRecord {
    pub season: String,
    pub competition: Competition,
    pub round: String,
    pub flht: String,
    pub slht: String,
    pub c1: f64,
    pub c2: f64,
    pub slht_qualified: bool,
    pub extra_time: bool,
}

/// `X = ln(c2′/c1′)` with `c′ = max(c, 0.001)`. Positive when the
/// second-leg home team is the stronger side.
pub fn build_predictor(tie: &TieRecord) -> f64 {
    build_predictor_with(tie, ZERO_COEFFICIENT_SUBSTITUTE)
}

pub fn build_predictor_with(tie: &TieRecord, floor: f64) -> f64 {
    let c1 = tie.c1.max(floor);
    let c2 = tie.c2.max(floor);
    c2.ln() - c1.ln()
}

/// Regression sample `(Xᵢ, Yᵢ)` with `Yᵢ = 1` when the second-leg home team
/// went through.
pub fn ties_to_sample(ties: &[TieRecord]) -> Result<Sample> {
    Sample::new(
        ties.iter().map(build_predictor).collect(),
        ties.iter().map(|t| t.slht_qualified).collect(),
    )
}

pub fn load_ties(path: &Path) -> Result<Vec<TieRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_ties(file, &path.display().to_string())
}

/// Parses tie records from CSV. `source` only labels error messages.
pub fn read_ties<R: Read>(input: R, source: &str) -> Result<Vec<TieRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let schema_error = || Error::Schema {
        path: source.to_string(),
        expected: TIE_HEADER.join(","),
    };
    let header = reader.headers().map_err(|_| schema_error())?.clone();
    if header.iter().ne(TIE_HEADER.iter().copied()) {
        return Err(schema_error());
    }

    let mut ties = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        let fail = |i: usize, reason: String| Error::Parse {
            line,
            column: TIE_HEADER[i].to_string(),
            reason,
        };
        let coefficient = |i: usize| -> Result<f64> {
            let v: f64 = field(i)
                .parse()
                .map_err(|_| fail(i, format!("`{}` is not a number", field(i))))?;
            if !v.is_finite() || v < 0.0 {
                return Err(fail(
                    i,
                    format!("coefficient must be finite and ≥ 0, got {v}"),
                ));
            }
            Ok(v)
        };
        let flag = |i: usize| -> Result<bool> {
            match field(i) {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(fail(i, format!("expected 0 or 1, got `{other}`"))),
            }
        };
        ties.push(TieRecord {
            season: field(0).to_string(),
            competition: field(1).parse().map_err(|e| fail(1, e))?,
            round: field(2).to_string(),
            flht: field(3).to_string(),
            slht: field(4).to_string(),
            c1: coefficient(5)?,
            c2: coefficient(6)?,
            slht_qualified: flag(7)?,
            extra_time: flag(8)?,
        });
    }
    Ok(ties)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
season,competition,round,flht,slht,c1,c2,slht_qualified,extra_time
2014-15,ChampionsLeague,Q1,La Fiorita,Levadia Tallinn,0.699,4.575,1,0
2014-15,ChampionsLeague,SF,FC Barcelona,Bayern Muenchen,157.542,154.328,0,0
2014-15,EuropaLeague,Q1,Lincoln Red Imps,Some Club,0,0.05,0,1
";

    fn tie(c1: f64, c2: f64) -> TieRecord {
        TieRecord {
            season: "2014-15".into(),
            competition: Competition::ChampionsLeague,
            round: "Q1".into(),
            flht: "A".into(),
            slht: "B".into(),
            c1,
            c2,
            slht_qualified: true,
            extra_time: false,
        }
    }

    #[test]
    fn reads_fixture() {
        let ties = read_ties(FIXTURE.as_bytes(), "fixture").unwrap();
        assert_eq!(ties.len(), 3);
        assert_eq!(ties[2].competition, Competition::EuropaLeague);
        assert!(ties[2].extra_time);
        assert_eq!(ties[0].flht, "La Fiorita");
    }

    #[test]
    fn negative_coefficient_names_row() {
        let bad = FIXTURE.replace("157.542", "-1.5");
        match read_ties(bad.as_bytes(), "fixture") {
            Err(Error::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "c1");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_flag_and_header() {
        let bad = FIXTURE.replace("4.575,1,0", "4.575,yes,0");
        assert!(matches!(
            read_ties(bad.as_bytes(), "f"),
            Err(Error::Parse { line: 2, .. })
        ));
        let bad = FIXTURE.replace("extra_time", "et");
        assert!(matches!(
            read_ties(bad.as_bytes(), "f"),
            Err(Error::Schema { .. })
        ));
        assert!(matches!(
            read_ties("".as_bytes(), "f"),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn predictor_examples() {
        let x = build_predictor(&tie(0.699, 4.575));
        assert!(((4.575f64 / 0.699) - 6.545).abs() < 5e-4);
        assert!((x - 1.878_711_235_475_811).abs() < 1e-12);
        assert_eq!(build_predictor(&tie(3.2, 3.2)), 0.0);
        assert!((build_predictor(&tie(0.0, 0.05)) - 3.912_023_005_428_146).abs() < 1e-12);
    }

    #[test]
    fn predictor_antisymmetry() {
        for (a, b) in [(0.699, 4.575), (0.0, 12.0), (157.542, 154.328)] {
            assert_eq!(build_predictor(&tie(a, b)), -build_predictor(&tie(b, a)));
        }
    }
}
