#ifndef OPERATORS_OPS_H
#define OPERATORS_OPS_H

#include <ostream>

class A
{
  public:
    A();
    int value;
};

bool operator==(const A& lhs, const A& rhs);
A operator-(const A& a);
std::ostream& operator<<(std::ostream& os, const A& a);

#endif
