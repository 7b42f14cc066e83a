//! Proactive EV route planning with reservation-aware partial recharging.
//!
//! [`gtds`] holds the station graph, [`ledger`] the per-slot reservation
//! table, [`search`] the optimal charging path engine, [`influence`] scores
//! paths against predicted future requests, [`planner`] wraps everything into
//! named planning modes, [`sim`] drives request streams and [`oracle`] is an
//! independent brute-force reference for small instances.

pub mod gtds;
pub mod influence;
pub mod io;
pub mod ledger;
pub mod oracle;
pub mod planner;
pub mod search;
pub mod sim;
pub mod units;

pub use gtds::{Gtds, NodeId};
pub use ledger::Trt;
pub use units::{Energy, Minutes, Slot, SlotRange};
