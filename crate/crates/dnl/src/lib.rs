//! Command line tool and HTTP service for Dataset Nutrition Labels.

pub mod api_error;
pub mod cli;
pub mod server;
pub mod store;

pub use api_error::ApiError;
pub use server::{router, serve_on, AppState, Clock};
pub use store::{LabelStore, LabelSummary, StoreError, SubmitError};
