#pragma once

namespace schreier {

// Selects between the OpenMP kernel and the serial reference path of an
// operation. Both paths return identical results; the serial one is kept as
// the reference the parallel kernels are tested against.
enum class Exec { serial, parallel };

}  // namespace schreier
