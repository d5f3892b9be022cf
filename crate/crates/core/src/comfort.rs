//! Per-occupant comfort model.
//!
//! Each occupant has an ideal temperature `T*`, a sensitivity `σ` and a
//! tolerance `Δ`. Discomfort is a Gaussian bump mirrored on either side of
//! `T*`: positive (cold) below the ideal, negative (hot) above it. The
//! ternary [`ComfortSignal`] is what an occupant reports to the controller.

use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupant {
    id: u32,
    ideal_temp: f64,
    sensitivity: f64,
    tolerance: f64,
}

impl Occupant {
    pub fn new(id: u32, ideal_temp: f64, sensitivity: f64, tolerance: f64) -> Result<Self> {
        ensure_finite("ideal_temp", ideal_temp)?;
        if !(sensitivity.is_finite() && sensitivity > 0.0) {
            return Err(Error::invalid(
                "sensitivity",
                format!("must be finite and > 0, got {sensitivity}"),
            ));
        }
        if !(tolerance.is_finite() && tolerance >= 0.0) {
            return Err(Error::invalid(
                "tolerance",
                format!("must be finite and >= 0, got {tolerance}"),
            ));
        }
        Ok(Occupant {
            id,
            ideal_temp,
            sensitivity,
            tolerance,
        })
    }

    pub fn id(&self) -> u32 {
        self.id
    }

    pub fn ideal_temp(&self) -> f64 {
        self.ideal_temp
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Same occupant with a different tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Result<Self> {
        Occupant::new(self.id, self.ideal_temp, self.sensitivity, tolerance)
    }

    /// Lower edge `T* − Δ` of the acceptable range.
    pub fn lower_bound(&self) -> f64 {
        self.ideal_temp - self.tolerance
    }

    /// Upper edge `T* + Δ` of the acceptable range.
    pub fn upper_bound(&self) -> f64 {
        self.ideal_temp + self.tolerance
    }

    /// Signed discomfort in (−1, 1): positive when the room is colder than
    /// the ideal, negative when warmer, zero exactly at the ideal.
    pub fn signed_discomfort(&self, room_temp: f64) -> Result<f64> {
        ensure_finite("room_temp", room_temp)?;
        Ok(self.signed_discomfort_unchecked(room_temp))
    }

    pub(crate) fn signed_discomfort_unchecked(&self, room_temp: f64) -> f64 {
        let offset = room_temp - self.ideal_temp;
        let bump = 1.0 - (-(offset * offset) / (self.sensitivity * self.sensitivity)).exp();
        if room_temp < self.ideal_temp {
            bump
        } else if room_temp > self.ideal_temp {
            -bump
        } else {
            0.0
        }
    }

    /// Absolute discomfort in [0, 1).
    pub fn abs_discomfort(&self, room_temp: f64) -> Result<f64> {
        self.signed_discomfort(room_temp).map(f64::abs)
    }

    pub(crate) fn abs_discomfort_unchecked(&self, room_temp: f64) -> f64 {
        self.signed_discomfort_unchecked(room_temp).abs()
    }

    /// Ternary feedback. Both edges of `[T* − Δ, T* + Δ]` count as comfortable.
    pub fn comfort_signal(&self, room_temp: f64) -> Result<ComfortSignal> {
        ensure_finite("room_temp", room_temp)?;
        Ok(self.comfort_signal_unchecked(room_temp))
    }

    pub(crate) fn comfort_signal_unchecked(&self, room_temp: f64) -> ComfortSignal {
        if room_temp < self.lower_bound() {
            ComfortSignal::Cold
        } else if room_temp > self.upper_bound() {
            ComfortSignal::Hot
        } else {
            ComfortSignal::Comfortable
        }
    }
}

/// Occupant feedback, encoded as +1 / 0 / −1 for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ComfortSignal {
    Cold,
    Comfortable,
    Hot,
}

impl ComfortSignal {
    pub fn value(self) -> i32 {
        match self {
            ComfortSignal::Cold => 1,
            ComfortSignal::Comfortable => 0,
            ComfortSignal::Hot => -1,
        }
    }
}

impl From<ComfortSignal> for i32 {
    fn from(signal: ComfortSignal) -> i32 {
        signal.value()
    }
}
