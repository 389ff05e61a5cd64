"""Umbilic classification, direction fields and indices."""

from .classify import (PointType, classify_batch, classify_point, principal_tensor,
                       reduction_of, tct_check, type_mask, umbilic_tol)
from .directions import (EVERYWHERE_NULL, HalfInt, LineDir, eigen_directions,
                         null_directions)
from .fields import (EigenLineField, GluedField, LineField, NullLineField, PerpField,
                     Sector, SmoothNullFlow, TensorField, ThmEField, VectorLineField,
                     characteristic_field, eigen_field, glued_field, null_field,
                     perp_flow, thmE_fields)
from .tensors import (SymTensor2, characteristic_vector, build_tensor, checked_e2h, hessian_matrix,
                      s_matrix, t_matrix)
from .winding import (WindingOptions, WindingReport, circle_points, index_line_field,
                      winding_vector_field)

__all__ = [n for n in dir() if not n.startswith("_")]
