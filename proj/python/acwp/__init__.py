# Copyright 2026 The ACWP Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the acwp messaging core."""

from ._acwp import (
    BadLegacyLine,
    Broker,
    BrokerError,
    LegacyTranslator,
    ProtocolError,
    ScenarioError,
    canonical_document,
    decode_frames,
    demo_schema_text,
    encode_document,
    encode_frame,
    parse_document,
    run_simulation,
    schema_types,
    validate,
)

__all__ = [
    "BadLegacyLine",
    "Broker",
    "BrokerError",
    "LegacyTranslator",
    "ProtocolError",
    "ScenarioError",
    "canonical_document",
    "decode_frames",
    "demo_schema_text",
    "encode_document",
    "encode_frame",
    "parse_document",
    "run_simulation",
    "schema_types",
    "validate",
]
