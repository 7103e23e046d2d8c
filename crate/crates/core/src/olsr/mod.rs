//! OLSR protocol logic: configuration and genome mapping, control messages,
//! per-node state, MPR selection and route computation.

mod config;
mod message;
mod mpr;
mod routes;
mod state;

pub use config::{
    decode_genome, encode_genome, gene, hello_emission_interval, rfc_default, GeneSpec, OlsrConfig, ParamSpace,
    WILL_ALWAYS, WILL_DEFAULT, WILL_NEVER,
};
pub use message::{
    ControlMessage, HelloEntry, LinkStatus, MessageKind, Payload, HELLO_ENTRY_BYTES, HELLO_HEADER_BYTES,
    TC_ENTRY_BYTES, TC_HEADER_BYTES,
};
pub use mpr::select_mprs;
pub use routes::{compute_routes, Route};
pub use state::{LinkTuple, OlsrNodeState, TopologyTuple};
