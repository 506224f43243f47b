#include "admdae/robot.hpp"

namespace admdae::robot {

SystemConfig config() {
  SystemConfig c;
  c.name = "two_link_robot";
  c.coordinates = {"p1", "p2"};
  c.velocities = {"v1", "v2"};
  c.parameters = {{"l1", 1.0}, {"l2", 1.0}, {"m1", 3.0}, {"m2", 3.0}};
  const std::string off_diagonal = "m2*(l2^2/3+(1/2)*l1*l2*cos(p2))";
  c.mass_matrix = {
      {"m1*l1^2/3+m2*(l1^2+l2^2/3+l1*l2*cos(p2))", off_diagonal},
      {off_diagonal, "m2*l2^2/3"},
  };
  c.force = {
      "(l1*cos(p1)+l2*cos(p1+p2))*v1-3*p1",
      "(l2*cos(p1+p2))*v1+(1-(3/2)*cos(p2))*p1",
  };
  c.constraints = {"l1*sin(p1)+l2*sin(p1+p2)"};
  c.initial_p = {0.0, 0.0};
  c.initial_v = {1.0, -2.0};
  c.reference = ReferenceConfig{
      {"sin(t)", "-2*sin(t)"},
      {"cos(t)", "-2*cos(t)"},
      {"cos(t)"},
  };
  return c;
}

LoadedSystem load() { return build_system(config()); }

}  // namespace admdae::robot
