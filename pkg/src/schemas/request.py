"""Request schemas for the HTTP surface."""

from pydantic import BaseModel, Field, model_validator


class SpectrumRequest(BaseModel):
    """Overlap values on the grid for GHZ size n."""

    n: int = Field(..., description="GHZ size; the grid has 2(n+1) angles", ge=1)
    s_values: list[float] = Field(..., description="S_phi per grid angle", min_length=2)
    s_stderr: list[float] | None = Field(default=None, description="Standard error per angle")

    @model_validator(mode="after")
    def check_lengths(self) -> "SpectrumRequest":
        if self.s_stderr is not None and len(self.s_stderr) != len(self.s_values):
            raise ValueError("s_stderr must match s_values in length")
        return self
