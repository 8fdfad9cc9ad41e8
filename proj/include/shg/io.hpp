#pragma once

#include <iosfwd>
#include <string>

#include "shg/field.hpp"

namespace shg {

// Text format: header "grid n1 n2 n3 h1 h2 h3 origin o1 o2 o3", then one line
// per node (x fastest) with Re/Im of the three components.
void write_field(std::ostream& os, const ComplexVectorField& f);
ComplexVectorField read_field(std::istream& is);
void save_field(const std::string& path, const ComplexVectorField& f);
ComplexVectorField load_field(const std::string& path);

// Same header; each line starts with the face tag (0..5) followed by six reals.
void write_trace(std::ostream& os, const TangentialTrace& t);
TangentialTrace read_trace(std::istream& is);
void save_trace(const std::string& path, const TangentialTrace& t);
TangentialTrace load_trace(const std::string& path);

}  // namespace shg
