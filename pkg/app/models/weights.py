"""Weights defining indefinite inner products."""

from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, model_serializer

from app.models.matrix import Matrix


class Weight(BaseModel):
    """An invertible Hermitian matrix together with its exact inverse."""

    model_config = ConfigDict(frozen=True)

    h: Matrix
    h_inverse: Matrix

    @property
    def order(self) -> int:
        return self.h.rows

    @model_serializer
    def _serialize(self) -> Dict[str, Any]:
        return self.h.to_json()


class WeightTriple(BaseModel):
    """Weights M, N, L for A: C^n -> C^m and B: C^l -> C^n."""

    model_config = ConfigDict(frozen=True)

    m: Weight
    n: Weight
    l: Weight

    @property
    def orders(self) -> tuple:
        return (self.m.order, self.n.order, self.l.order)

    @model_serializer
    def _serialize(self) -> Dict[str, Any]:
        return {"M": self.m.h.to_json(), "N": self.n.h.to_json(), "L": self.l.h.to_json()}
