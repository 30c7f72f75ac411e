// Restrict a cubic to four hyperplanes, glue it back, then recover the
// same cubic from its values on a cone.

#include <iostream>

#include "analytica/analytica.hpp"

int main() {
  using namespace analytica;
  const HomogeneousForm g = HomogeneousForm::monomial({3, 0, 0}) - 2 * HomogeneousForm::monomial({1, 1, 1}) +
                            ratio(1, 2) * HomogeneousForm::monomial({0, 1, 2});
  std::cout << "g         = " << g.to_string() << "\n";

  std::vector<HyperplaneRestriction> rs;
  for (const RVec& normal : {RVec{1, 0, 0}, RVec{0, 1, 0}, RVec{0, 0, 1}, RVec{1, 1, 1}})
    rs.push_back(restrict_to_hyperplane(g, Hyperplane(normal)));
  std::cout << "glued     = " << glue_hyperplanes(3, rs).to_string() << "\n";

  const Cone cone(VectorPlane2(unit_vector(3, 0), unit_vector(3, 1)), ratio(1, 2));
  const auto sigma = [&](const RVec& p) { return evaluate_form(g, p); };
  std::cout << "from cone = " << reconstruct_form_from_cone(3, sigma, cone, 7).form.to_string() << "\n";
}
