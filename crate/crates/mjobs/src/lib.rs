//! Command-line tool and HTTP service for the job recommender.

pub mod api;
pub mod cli;
pub mod server;
