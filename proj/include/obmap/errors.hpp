// Copyright 2026 the obmap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace obmap {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cloud or transform arrived in a different frame than the operation expects.
class FrameMismatch : public Error {
 public:
  using Error::Error;
};

/// Two grids that must share width/height/resolution/origin do not.
class GeometryMismatch : public Error {
 public:
  using Error::Error;
};

/// A parameter or value violates a documented precondition (NaN point, leaf_size <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// PCD header is missing required keys, inconsistent, or unparseable.
class MalformedHeader : public Error {
 public:
  using Error::Error;
};

/// PCD body holds fewer points than the header promises.
class TruncatedBody : public Error {
 public:
  using Error::Error;
};

/// PCD DATA mode this reader deliberately does not implement (binary_compressed).
class UnsupportedDataMode : public Error {
 public:
  using Error::Error;
};

/// Image file does not start with the expected magic number.
class BadMagic : public Error {
 public:
  using Error::Error;
};

/// Image payload size disagrees with the declared width x height.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Grayscale images with a maxval other than 255 are not handled.
class MaxvalUnsupported : public Error {
 public:
  using Error::Error;
};

/// Too few points, or every sampled model was degenerate.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// RANSAC finished but the best model's inlier fraction is below the configured minimum.
class NoFloorFound : public Error {
 public:
  using Error::Error;
};

/// A box fit was requested for a cluster with no members.
class EmptyCluster : public Error {
 public:
  using Error::Error;
};

/// A configuration file is missing, unparseable, or fails validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A scene description fails validation.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// An output path could not be opened for writing.
class UnwritablePath : public Error {
 public:
  using Error::Error;
};

/// A file could not be read.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace obmap
