"""Pydantic request/response models and websocket frame schemas."""
from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field, TypeAdapter


class DemoGenRequest(BaseModel):
    scene_path: str | None = None
    out_path: str


class DemoGenResponse(BaseModel):
    path: str
    frames: int
    duration: float


class FitRequest(BaseModel):
    archive_path: str
    out_path: str
    n_basis: int = 30
    k: int = 5
    bic: bool = False


class FitResponse(BaseModel):
    path: str
    k: int
    n_basis: int
    tau: float


class ReproduceRequest(BaseModel):
    skill_path: str
    scene_path: str | None = None
    out_path: str
    dx: float = 0.0
    dy: float = 0.0
    dyaw: float = 0.0
    tau_scale: float = 1.5


class ReproduceResponse(BaseModel):
    path: str
    success: bool
    failure_reason: str | None
    duration: float
    peak_force: float
    wrench_rmse_vs_demo: float | None


class EvaluateRequest(BaseModel):
    skill_path: str
    scene_path: str | None = None
    conditions_path: str
    out_path: str
    tau_scale: float = 1.5


class EvaluateFailure(BaseModel):
    id: str
    failure_reason: str | None


class EvaluateResponse(BaseModel):
    path: str
    successes: int
    episodes: int
    success_rate: float
    failures: list[EvaluateFailure]


class ExportProfilesRequest(BaseModel):
    skill_path: str
    result_path: str
    out_path: str


class ExportProfilesResponse(BaseModel):
    path: str
    rows: int


class ErrorDetail(BaseModel):
    kind: Literal["input", "demonstrator", "fit"]
    message: str


# --- websocket frames ---------------------------------------------------------

class PoseMessage(BaseModel):
    type: Literal["pose"]
    x: float
    y: float
    yaw: float
    grip: float = Field(ge=0.0, le=1.0, default=1.0)


class StartRecordingMessage(BaseModel):
    type: Literal["start_recording"]


class StopRecordingMessage(BaseModel):
    type: Literal["stop_recording"]
    save_as: str


class ResetMessage(BaseModel):
    type: Literal["reset"]
    dx: float = 0.0
    dy: float = 0.0
    dyaw: float = 0.0


ClientMessage = Annotated[
    Union[PoseMessage, StartRecordingMessage, StopRecordingMessage, ResetMessage],
    Field(discriminator="type"),
]

client_message_adapter: TypeAdapter = TypeAdapter(ClientMessage)


class StateFrame(BaseModel):
    type: Literal["state"] = "state"
    t: float
    cmd: list[float]
    actual: list[float]
    wrench: list[float]
    contacts: list[bool]
    recording: bool


class ErrorFrame(BaseModel):
    type: Literal["error"] = "error"
    reason: str


class SavedFrame(BaseModel):
    type: Literal["saved"] = "saved"
    path: str
