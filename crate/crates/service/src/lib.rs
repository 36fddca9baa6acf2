//! Annotation campaign service: seeded item sampling, blind assignments,
//! durable response storage and agreement reports over HTTP.

pub mod campaign;
pub mod error;
pub mod http;
pub mod store;

pub use campaign::{Annotator, BlindItem, Campaign, CampaignSpec, DatasetTag, PoolItem, PresentationOrder, SamplingPolicy};
pub use error::{Result, ServiceError};
pub use http::{
    router, serve, AppState, AssignedItem, Assignment, CampaignView, CreatedCampaign, IssuedToken, ItemStatus, Progress,
    SubmissionResult, ADMIN_TOKEN_ENV,
};
pub use store::{AnnotatorProgress, CampaignHandle, CampaignState, Store, Submission, DATA_DIR_ENV};
