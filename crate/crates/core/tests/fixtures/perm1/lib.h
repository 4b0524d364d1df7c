#ifndef PERM_LIB_H
#define PERM_LIB_H

namespace shapes
{
    enum Kind
    {
        ROUND,
        SQUARE
    };

    class Shape
    {
      public:
        Shape();
        double area() const;
        double scale(const double factor);
        double scale(const double fx, const double fy);
    };

    class Circle : public Shape
    {
      public:
        Circle(const double radius);
        double radius;
    };

    Shape unit();
}

#endif
