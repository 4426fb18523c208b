//! The 34 consolidated industries used by the input-output tables.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

pub const INDUSTRY_COUNT: usize = 34;

const NAMES: [&str; INDUSTRY_COUNT] = [
    "Agriculture, forestry and fishery",
    "Mining",
    "Foods",
    "Textile products",
    "Pulp, paper and wooden products",
    "Chemical products",
    "Petroleum and coal products",
    "Ceramic, stone and clay products",
    "Iron and steel",
    "Non-ferrous metals",
    "Metal products",
    "General machinery",
    "Electrical machinery",
    "Information and communication machinery",
    "Electrical equipment",
    "Transportation equipment",
    "Precision instruments",
    "Miscellaneous manufacturing products",
    "Construction",
    "Electricity, gas and heat supply",
    "Water supply and waste management services",
    "Commerce",
    "Financial and insurance",
    "Real estate",
    "Transport",
    "Communication and broadcasting",
    "Public administration",
    "Education and research",
    "Medical service, health and social security and nursing care",
    "Other public services",
    "Business services",
    "Personal services",
    "Office supplies",
    "Activities not elsewhere classified",
];

/// Industry code in `1..=34`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndustryCode(u8);

impl IndustryCode {
    pub const ELECTRICAL_MACHINERY: IndustryCode = IndustryCode(13);
    pub const INFO_COMM_MACHINERY: IndustryCode = IndustryCode(14);

    pub fn new(code: u8) -> Result<Self> {
        if (1..=INDUSTRY_COUNT as u8).contains(&code) {
            Ok(IndustryCode(code))
        } else {
            Err(Error::Value(format!("industry code {code} outside 1..=34")))
        }
    }

    /// Code from a zero-based row/column index.
    pub fn from_index(idx: usize) -> Result<Self> {
        if idx < INDUSTRY_COUNT {
            Ok(IndustryCode(idx as u8 + 1))
        } else {
            Err(Error::Value(format!("industry index {idx} outside 0..34")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn name(self) -> &'static str {
        NAMES[self.index()]
    }

    pub fn all() -> impl Iterator<Item = IndustryCode> {
        (1..=INDUSTRY_COUNT as u8).map(IndustryCode)
    }
}

impl fmt::Display for IndustryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}", self.0)
    }
}

impl FromStr for IndustryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::Value(format!("industry code {s:?} is not an integer")))?;
        IndustryCode::new(code)
    }
}
