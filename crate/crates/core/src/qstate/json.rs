use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PureState;
use crate::error::Error;

/// Wire form of a pure state: `{"dims":[..], "re":[..], "im":[..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        StateJson {
            dims: s.dims().to_vec(),
            re: s.amplitudes().iter().map(|z| z.re).collect(),
            im: s.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<StateJson> for PureState {
    type Error = Error;

    fn try_from(j: StateJson) -> Result<Self, Error> {
        if j.re.len() != j.im.len() {
            return Err(Error::dims(j.re.len(), j.im.len()));
        }
        let amps =
            j.re.iter()
                .zip(&j.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        PureState::new(j.dims, amps)
    }
}

impl Serialize for PureState {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        StateJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = StateJson::deserialize(de)?;
        PureState::try_from(j).map_err(serde::de::Error::custom)
    }
}
