//! Bundled trial fixtures. These are reconstructions calibrated to published
//! summary statistics; each file's header comment records how it was built.

use crate::io::{parse_survival_csv, parse_waterfall_csv};
use crate::survival::SurvivalCurve;
use crate::waterfall::WaterfallSample;

macro_rules! fixture {
    ($name:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $name))
    };
}

pub const KEYNOTE062_CHEMO_DOR: &str = fixture!("keynote062_chemo_dor.csv");
pub const KEYNOTE062_PEMBRO_DOR: &str = fixture!("keynote062_pembro_dor.csv");
pub const CHECKMATE067_IPI_WF: &str = fixture!("checkmate067_ipi_wf.csv");
pub const CHECKMATE067_NIVO_WF: &str = fixture!("checkmate067_nivo_wf.csv");
pub const CHECKMATE067_COMBO_WF: &str = fixture!("checkmate067_combo_wf.csv");
pub const HODGKIN_NIVO_WF: &str = fixture!("hodgkin_nivo_wf.csv");
pub const HODGKIN_BV_WF: &str = fixture!("hodgkin_bv_wf.csv");
pub const HODGKIN_COMBO_WF: &str = fixture!("hodgkin_combo_wf.csv");
pub const HYPOTHETICAL_DRUG1_WF: &str = fixture!("hypothetical_drug1_wf.csv");
pub const HYPOTHETICAL_DRUG2_WF: &str = fixture!("hypothetical_drug2_wf.csv");

/// KEYNOTE-062 response rates: chemotherapy and pembrolizumab.
pub const KEYNOTE062_ORR: (f64, f64) = (0.372, 0.148);
/// CheckMate-067 response rates: ipilimumab and nivolumab.
pub const CHECKMATE067_ORR: (f64, f64) = (0.190, 0.437);

pub fn curve(text: &str) -> SurvivalCurve {
    parse_survival_csv(text).expect("bundled fixture is valid").curve
}

pub fn waterfall(text: &str) -> WaterfallSample {
    parse_waterfall_csv(text).expect("bundled fixture is valid")
}
